#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>

#include "support.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run cedar_cli(const std::string& args) {
  std::string cmd = std::string(CEDAR_CLI) + " " + args + " 2>/dev/null";
  Run r{-1, ""};
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string d(const std::string& name) { return cedar::test::data_path(name); }

std::string authorize(const std::string& request) {
  return "authorize --policies " + d("tinytodo.cedar") + " --entities " + d("entities.json") + " --request " +
         d(request);
}

TEST(Cli, AuthorizeAllow) {
  auto r = cedar_cli(authorize("request_alice_get.json"));
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "{\"decision\":\"Allow\",\"determining\":[\"policy0\",\"policy1\"],\"errors\":[]}\n");
}

TEST(Cli, AuthorizeDeny) {
  auto r = cedar_cli(authorize("request_bob_create.json"));
  EXPECT_EQ(r.code, 3);
  EXPECT_EQ(r.out, "{\"decision\":\"Deny\",\"determining\":[\"policy2\"],\"errors\":[]}\n");
}

TEST(Cli, AuthorizeMalformedEntities) {
  auto r = cedar_cli("authorize --policies " + d("tinytodo.cedar") + " --entities " + d("tinytodo.cedar") +
                     " --request " + d("request_alice_get.json"));
  EXPECT_EQ(r.code, 2);
}

TEST(Cli, Validate) {
  EXPECT_EQ(cedar_cli("validate --policies " + d("tinytodo.cedar") + " --schema " + d("schema.json")).code, 0);
  EXPECT_EQ(cedar_cli("validate --policies " + d("pwner.cedar") + " --schema " + d("schema.json")).code, 3);
  EXPECT_EQ(cedar_cli("validate --policies " + d("pwner.cedar") + " --schema " + d("missing.json")).code, 2);
}

TEST(Cli, FormatIsIdempotentAndKeepsComments) {
  auto once = cedar_cli("format --in " + d("tinytodo.cedar") + " --width 80");
  ASSERT_EQ(once.code, 0);
  EXPECT_NE(once.out.find("// Policy 3"), std::string::npos);
  auto tmp = std::filesystem::temp_directory_path() / "cedar-cli-format.cedar";
  {
    std::ofstream f(tmp);
    f << once.out;
  }
  auto twice = cedar_cli("format --in " + tmp.string() + " --width 80");
  EXPECT_EQ(twice.out, once.out);
  std::filesystem::remove(tmp);
}

TEST(Cli, FuzzRunAndUnknownTarget) {
  auto corpus = std::filesystem::temp_directory_path() / "cedar-cli-corpus";
  std::filesystem::remove_all(corpus);
  auto ok = cedar_cli("fuzz run --target parser-safety --iterations 10000 --corpus " + corpus.string());
  EXPECT_EQ(ok.code, 0);
  EXPECT_EQ(cedar_cli("fuzz run --target nope --iterations 1").code, 2);
  std::filesystem::remove_all(corpus);
}

TEST(Cli, ReplayExitCodes) {
  auto corpus = std::filesystem::temp_directory_path() / "cedar-cli-replay";
  std::filesystem::remove_all(corpus);
  std::filesystem::create_directories(corpus / "parser-safety");
  {
    std::ofstream f(corpus / "parser-safety" / "case");
    f << "permit(principal, action, resource);";
  }
  EXPECT_EQ(cedar_cli("fuzz replay --target parser-safety --file " + (corpus / "parser-safety" / "case").string()).code, 0);
  EXPECT_EQ(cedar_cli("fuzz replay-all --corpus " + corpus.string()).code, 0);
  std::filesystem::create_directories(corpus / "no-such-target");
  EXPECT_EQ(cedar_cli("fuzz replay-all --corpus " + corpus.string()).code, 2);
  std::filesystem::remove_all(corpus);
}

}  // namespace
