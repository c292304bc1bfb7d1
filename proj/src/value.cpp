#include "holetune/value.hpp"

#include <sstream>

namespace holetune {

std::shared_ptr<const Sequence> makeSequence(std::vector<Value> elems,
                                             SeqRep rep) {
  auto store = std::make_shared<std::vector<Value>>(elems.rbegin(),
                                                    elems.rend());
  auto s = std::make_shared<Sequence>();
  s->len = store->size();
  s->store = std::move(store);
  s->rep = rep;
  return s;
}

bool valuesEqual(const Value &a, const Value &b) {
  if (a.index() != b.index())
    return false;
  if (auto x = std::get_if<std::int64_t>(&a))
    return *x == std::get<std::int64_t>(b);
  if (auto x = std::get_if<bool>(&a))
    return *x == std::get<bool>(b);
  if (auto x = std::get_if<std::shared_ptr<const Closure>>(&a)) {
    const auto &y = std::get<std::shared_ptr<const Closure>>(b);
    if ((*x)->lambda == y->lambda)
      return true;
    return (*x)->lambda->origin != kNoNode &&
           (*x)->lambda->origin == y->lambda->origin;
  }
  if (auto x = std::get_if<std::shared_ptr<const Sequence>>(&a)) {
    const auto &y = std::get<std::shared_ptr<const Sequence>>(b);
    if ((*x)->len != y->len)
      return false;
    for (std::size_t i = 0; i < y->len; ++i)
      if (!valuesEqual((*x)->at(i), y->at(i)))
        return false;
    return true;
  }
  if (auto x = std::get_if<std::shared_ptr<Cell>>(&a))
    return valuesEqual((*x)->value, std::get<std::shared_ptr<Cell>>(b)->value);
  const auto &x = std::get<std::shared_ptr<Array>>(a);
  const auto &y = std::get<std::shared_ptr<Array>>(b);
  if (x->slots.size() != y->slots.size())
    return false;
  for (std::size_t i = 0; i < x->slots.size(); ++i)
    if (!valuesEqual(x->slots[i], y->slots[i]))
      return false;
  return true;
}

std::string valueToString(const Value &v) {
  if (auto x = std::get_if<std::int64_t>(&v))
    return std::to_string(*x);
  if (auto x = std::get_if<bool>(&v))
    return *x ? "true" : "false";
  if (std::holds_alternative<std::shared_ptr<const Closure>>(v))
    return "<closure>";
  if (auto x = std::get_if<std::shared_ptr<const Sequence>>(&v)) {
    std::ostringstream out;
    out << '[';
    for (std::size_t i = 0; i < (*x)->len; ++i)
      out << (i ? ", " : "") << valueToString((*x)->at(i));
    out << ']';
    return out.str();
  }
  if (std::holds_alternative<std::shared_ptr<Cell>>(v))
    return "<cell>";
  return "<array>";
}

} // namespace holetune
