#pragma once

#include <cassert>
#include <type_traits>
#include <utility>
#include <variant>

namespace cedar {

template <class E>
struct Unexpected {
  E error;
};

template <class E>
Unexpected(E) -> Unexpected<E>;

// Value-or-error return type in the spirit of std::expected (unavailable in
// C++20).
template <class T, class E>
class Expected {
 public:
  Expected(const T& value) : data_(std::in_place_index<0>, value) {}
  Expected(T&& value) : data_(std::in_place_index<0>, std::move(value)) {}
  template <class G>
    requires std::is_constructible_v<E, G>
  Expected(Unexpected<G> err) : data_(std::in_place_index<1>, std::move(err.error)) {}

  bool has_value() const { return data_.index() == 0; }
  explicit operator bool() const { return has_value(); }

  T& value() & {
    assert(has_value());
    return std::get<0>(data_);
  }
  const T& value() const& {
    assert(has_value());
    return std::get<0>(data_);
  }
  T&& value() && {
    assert(has_value());
    return std::get<0>(std::move(data_));
  }
  const E& error() const& {
    assert(!has_value());
    return std::get<1>(data_);
  }
  E&& error() && {
    assert(!has_value());
    return std::get<1>(std::move(data_));
  }

  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

 private:
  std::variant<T, E> data_;
};

// Success-or-error, for checks that produce no value.
struct Ok {
  bool operator==(const Ok&) const = default;
};

}  // namespace cedar
