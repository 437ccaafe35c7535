#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kpcalc {

using GenId = std::uint32_t;

/// A field symbol u with jets u, u', u'', ...
struct Generator {
  std::string name;
  bool invertible = false;  // 1/u admitted
};

/// Registry of generators. Declaration order fixes the monomial order.
/// Built once, then shared read-only through ContextPtr.
class Context {
 public:
  GenId add(std::string name, bool invertible = false) {
    if (index_.count(name)) throw std::invalid_argument("duplicate generator '" + name + "'");
    if (is_reserved(name)) throw std::invalid_argument("reserved name '" + name + "'");
    const auto id = static_cast<GenId>(gens_.size());
    index_.emplace(name, id);
    gens_.push_back({std::move(name), invertible});
    return id;
  }

  /// Adds the generator unless it already exists.
  GenId ensure(const std::string& name, bool invertible = false) {
    if (auto g = find(name)) return *g;
    return add(name, invertible);
  }

  std::optional<GenId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  GenId id(std::string_view name) const {
    if (auto g = find(name)) return *g;
    throw std::out_of_range("unknown generator '" + std::string(name) + "'");
  }

  const Generator& operator[](GenId g) const { return gens_.at(g); }
  std::size_t size() const { return gens_.size(); }

  static bool is_reserved(std::string_view s) {
    return s == "del" || s == "dinv" || s == "inv" || s == "J" || s == "E";
  }

 private:
  std::vector<Generator> gens_;
  std::unordered_map<std::string, GenId> index_;
};

using ContextPtr = std::shared_ptr<const Context>;

}  // namespace kpcalc
