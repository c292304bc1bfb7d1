#include "holetune/interpreter.hpp"

#include "holetune/builtins.hpp"
#include "holetune/scope.hpp"

#include <pthread.h>

#include <algorithm>
#include <chrono>
#include <exception>

namespace holetune {

const char *costModeName(CostMode mode) {
  return mode == CostMode::Steps ? "steps" : "wallclock";
}

CostMode parseCostMode(const std::string &text) {
  if (text == "steps")
    return CostMode::Steps;
  if (text == "wallclock")
    return CostMode::Wallclock;
  throw Error("unknown cost mode '" + text + "'");
}

namespace {

using ClosurePtr = std::shared_ptr<const Closure>;
using SeqPtr = std::shared_ptr<const Sequence>;

std::string where(const Expr &e) {
  return std::to_string(e.loc.line) + ":" + std::to_string(e.loc.column) +
         ": ";
}

class Machine {
public:
  Machine(const Program &program, const EvalOptions &options)
      : program_(program), opt_(options), bindings_(program),
        instr_(options.pointCount),
        started_(std::chrono::steady_clock::now()) {}

  EvalResult run() {
    Value v = eval(&program_.root(), nullptr);
    EvalResult r{std::move(v), {}, stats_, std::move(instr_)};
    r.cost.mode = opt_.mode;
    r.cost.total = now();
    return r;
  }

private:
  struct DepthGuard {
    explicit DepthGuard(Machine &m) : m(m) {
      if (++m.depth_ > m.stats_.maxDepth)
        m.stats_.maxDepth = m.depth_;
      if (m.depth_ > m.opt_.depthBudget)
        throw RuntimeError("evaluation depth budget exceeded");
    }
    ~DepthGuard() { --m.depth_; }
    Machine &m;
  };

  void charge(std::int64_t n) { stats_.steps += n; }

  std::int64_t now() const {
    if (opt_.mode == CostMode::Steps)
      return stats_.steps;
    return std::chrono::duration_cast<std::chrono::nanoseconds>(
               std::chrono::steady_clock::now() - started_)
        .count();
  }

  static Env extend(Env env, VarId v, Value value) {
    auto n = std::make_shared<EnvNode>();
    n->var = v;
    n->value = std::move(value);
    n->next = std::move(env);
    return n;
  }

  Value lookup(const Env &env, VarId v, const Expr &at) const {
    for (Env cur = env; cur; cur = cur->next) {
      if (cur->recGroup) {
        if (v >= cur->var && v < cur->var + cur->count) {
          const Expr *lam = cur->recGroup->kids[v - cur->var].get();
          return std::make_shared<const Closure>(Closure{lam, cur});
        }
      } else if (cur->var == v) {
        return cur->value;
      }
    }
    throw RuntimeError(where(at) + "unbound variable '" + at.name + "'");
  }

  std::int64_t asInt(const Value &v, const Expr &at, const char *what) const {
    if (auto x = std::get_if<std::int64_t>(&v))
      return *x;
    throw RuntimeError(where(at) + what + " expects an integer, got " +
                       valueToString(v));
  }

  bool asBool(const Value &v, const Expr &at, const char *what) const {
    if (auto x = std::get_if<bool>(&v))
      return *x;
    throw RuntimeError(where(at) + what + " expects a boolean, got " +
                       valueToString(v));
  }

  SeqPtr asSeq(const Value &v, const Expr &at, const char *what) const {
    if (auto x = std::get_if<SeqPtr>(&v))
      return *x;
    throw RuntimeError(where(at) + what + " expects a sequence, got " +
                       valueToString(v));
  }

  ClosurePtr asClosure(const Value &v, const Expr &at) const {
    if (auto x = std::get_if<ClosurePtr>(&v))
      return *x;
    throw RuntimeError(where(at) + "application of a non-function value " +
                       valueToString(v));
  }

  bool matches(const Pattern &p, const Value &v, const Expr &at) const {
    switch (p.kind) {
    case PatternKind::Wildcard:
    case PatternKind::Var:
      return true;
    case PatternKind::Int:
      return asInt(v, at, "integer pattern") == p.intValue;
    case PatternKind::Bool:
      return asBool(v, at, at.isIf ? "if condition" : "boolean pattern") ==
             p.boolValue;
    }
    return false;
  }

  Value holeValue(const Expr &e) const {
    if (opt_.holeResolver)
      return opt_.holeResolver(e);
    auto it = opt_.holeValues.find(e.id);
    if (it != opt_.holeValues.end())
      return it->second;
    if (e.hole.kind == HoleKind::Boolean)
      return e.hole.defaultValue != 0;
    return e.hole.defaultValue;
  }

  /// Applies a closure outside tail position (builtin function arguments).
  Value apply(const Value &fn, Value arg, const Expr &site) {
    ClosurePtr c = asClosure(fn, site);
    charge(1);
    ++stats_.calls;
    if (opt_.onCall)
      opt_.onCall(site, *c);
    Env env = extend(c->env, bindings_.binder(c->lambda->id), std::move(arg));
    return eval(c->lambda->kids[0].get(), env);
  }

  Value eval(const Expr *e, Env env) {
    DepthGuard guard(*this);
    for (;;) {
      switch (e->kind) {
      case ExprKind::Int:
        charge(1);
        return e->intValue;
      case ExprKind::Bool:
        charge(1);
        return e->boolValue;
      case ExprKind::Var: {
        VarId v = bindings_.use(e->id);
        if (v != kNoVar)
          return lookup(env, v, *e);
        const BuiltinInfo *b = findBuiltin(e->name);
        if (b && b->arity == 0)
          return callBuiltin(*b, *e, {});
        if (b)
          throw RuntimeError(where(*e) + "builtin '" + e->name +
                             "' must be applied to " +
                             std::to_string(b->arity) + " arguments");
        throw RuntimeError(where(*e) + "unbound variable '" + e->name + "'");
      }
      case ExprKind::Lam:
        charge(1);
        return std::make_shared<const Closure>(Closure{e, env});
      case ExprKind::Let: {
        Value v = eval(e->kids[0].get(), env);
        env = extend(std::move(env), bindings_.binder(e->id), std::move(v));
        e = e->kids[1].get();
        continue;
      }
      case ExprKind::RecLet: {
        for (std::size_t i = 0; i + 1 < e->kids.size(); ++i)
          if (e->kids[i]->kind != ExprKind::Lam)
            throw RuntimeError(where(*e->kids[i]) +
                               "recursive binding of '" + e->binders[i] +
                               "' must be a lambda");
        auto frame = std::make_shared<EnvNode>();
        frame->var = bindings_.binder(e->id);
        frame->count = static_cast<int>(e->binders.size());
        frame->recGroup = e;
        frame->next = std::move(env);
        env = std::move(frame);
        e = e->kids.back().get();
        continue;
      }
      case ExprKind::Seq: {
        charge(1 + static_cast<std::int64_t>(e->kids.size()));
        std::vector<Value> elems;
        elems.reserve(e->kids.size());
        for (const auto &k : e->kids)
          elems.push_back(eval(k.get(), env));
        return makeSequence(std::move(elems), SeqRep::List);
      }
      case ExprKind::Match: {
        charge(1);
        Value s = eval(e->kids[0].get(), env);
        if (matches(e->pattern, s, *e)) {
          if (e->pattern.kind == PatternKind::Var)
            env = extend(std::move(env), bindings_.binder(e->id), std::move(s));
          e = e->kids[1].get();
        } else {
          e = e->kids[2].get();
        }
        continue;
      }
      case ExprKind::Hole:
        charge(1);
        return holeValue(*e);
      case ExprKind::Independent:
        e = e->kids[0].get();
        continue;
      case ExprKind::App: {
        const Expr &head = *e->kids[0];
        if (head.kind == ExprKind::Var && bindings_.use(head.id) == kNoVar) {
          if (const BuiltinInfo *b = findBuiltin(head.name)) {
            std::size_t argc = e->kids.size() - 1;
            if (static_cast<int>(argc) != b->arity)
              throw RuntimeError(where(*e) + "builtin '" + head.name +
                                 "' expects " + std::to_string(b->arity) +
                                 " arguments, got " + std::to_string(argc));
            std::vector<Value> args;
            args.reserve(argc);
            std::int64_t saved = stats_.steps;
            for (std::size_t i = 1; i < e->kids.size(); ++i)
              args.push_back(eval(e->kids[i].get(), env));
            if (b->free)
              stats_.steps = saved;
            return callBuiltin(*b, *e, std::move(args));
          }
        }
        Value fn = eval(&head, env);
        std::vector<Value> args;
        args.reserve(e->kids.size() - 1);
        for (std::size_t i = 1; i < e->kids.size(); ++i)
          args.push_back(eval(e->kids[i].get(), env));
        ++stats_.calls;
        for (std::size_t i = 0; i < args.size(); ++i) {
          ClosurePtr c = asClosure(fn, *e);
          charge(1);
          if (i == 0 && opt_.onCall)
            opt_.onCall(*e, *c);
          Env inner =
              extend(c->env, bindings_.binder(c->lambda->id), std::move(args[i]));
          if (i + 1 == args.size()) {
            e = c->lambda->kids[0].get();
            env = std::move(inner);
            break;
          }
          fn = eval(c->lambda->kids[0].get(), inner);
        }
        continue;
      }
      }
    }
  }

  Value callBuiltin(const BuiltinInfo &b, const Expr &site,
                    std::vector<Value> args) {
    auto seqCost = [](const Sequence &s, std::int64_t list, std::int64_t rope) {
      return s.rep == SeqRep::List ? list : rope;
    };
    auto index = [&](const Sequence &s, const Value &v, const char *what) {
      std::int64_t i = asInt(v, site, what);
      if (i < 0 || static_cast<std::size_t>(i) >= s.len)
        throw RuntimeError(where(site) + what + " index " + std::to_string(i) +
                           " out of bounds for length " +
                           std::to_string(s.len));
      return static_cast<std::size_t>(i);
    };
    auto len = [](const Sequence &s) { return static_cast<std::int64_t>(s.len); };

    switch (b.id) {
    case Builtin::Addi:
    case Builtin::Subi:
    case Builtin::Muli:
    case Builtin::Divi:
    case Builtin::Modi: {
      charge(1);
      auto x = static_cast<std::uint64_t>(asInt(args[0], site, "arithmetic"));
      auto y = static_cast<std::uint64_t>(asInt(args[1], site, "arithmetic"));
      switch (b.id) {
      case Builtin::Addi:
        return static_cast<std::int64_t>(x + y);
      case Builtin::Subi:
        return static_cast<std::int64_t>(x - y);
      case Builtin::Muli:
        return static_cast<std::int64_t>(x * y);
      default:
        break;
      }
      auto sx = static_cast<std::int64_t>(x), sy = static_cast<std::int64_t>(y);
      if (sy == 0)
        throw RuntimeError(where(site) + "division by zero");
      if (sy == -1)
        return b.id == Builtin::Divi
                   ? static_cast<std::int64_t>(0 - x)
                   : std::int64_t{0};
      return b.id == Builtin::Divi ? sx / sy : sx % sy;
    }
    case Builtin::Lti:
      charge(1);
      return asInt(args[0], site, "lti") < asInt(args[1], site, "lti");
    case Builtin::Leqi:
      charge(1);
      return asInt(args[0], site, "leqi") <= asInt(args[1], site, "leqi");
    case Builtin::Eqi:
      charge(1);
      if (std::holds_alternative<bool>(args[0]))
        return asBool(args[0], site, "eqi") == asBool(args[1], site, "eqi");
      return asInt(args[0], site, "eqi") == asInt(args[1], site, "eqi");
    case Builtin::Length: {
      SeqPtr s = asSeq(args[0], site, "length");
      charge(seqCost(*s, len(*s) + 1, 1));
      return len(*s);
    }
    case Builtin::Get: {
      SeqPtr s = asSeq(args[0], site, "get");
      std::size_t i = index(*s, args[1], "get");
      charge(seqCost(*s, static_cast<std::int64_t>(i) + 1, 1));
      return s->at(i);
    }
    case Builtin::Set: {
      SeqPtr s = asSeq(args[0], site, "set");
      std::size_t i = index(*s, args[1], "set");
      charge(seqCost(*s, static_cast<std::int64_t>(i) + 1, 1));
      std::vector<Value> elems;
      elems.reserve(s->len);
      for (std::size_t k = 0; k < s->len; ++k)
        elems.push_back(k == i ? args[2] : s->at(k));
      return makeSequence(std::move(elems), s->rep);
    }
    case Builtin::Cons: {
      SeqPtr s = asSeq(args[1], site, "cons");
      charge(seqCost(*s, 1, len(*s) + 1));
      auto out = std::make_shared<Sequence>(*s);
      if (s->begin + s->len != s->store->size()) {
        out->store = std::make_shared<std::vector<Value>>(
            s->store->begin() + static_cast<std::ptrdiff_t>(s->begin),
            s->store->begin() + static_cast<std::ptrdiff_t>(s->begin + s->len));
        out->begin = 0;
      }
      out->store->push_back(std::move(args[0]));
      ++out->len;
      return SeqPtr(std::move(out));
    }
    case Builtin::Head: {
      SeqPtr s = asSeq(args[0], site, "head");
      charge(1);
      if (s->len == 0)
        throw RuntimeError(where(site) + "head of an empty sequence");
      return s->at(0);
    }
    case Builtin::Tail: {
      SeqPtr s = asSeq(args[0], site, "tail");
      charge(seqCost(*s, 1, 2));
      if (s->len == 0)
        throw RuntimeError(where(site) + "tail of an empty sequence");
      auto out = std::make_shared<Sequence>(*s);
      --out->len;
      return SeqPtr(std::move(out));
    }
    case Builtin::Concat: {
      SeqPtr a = asSeq(args[0], site, "concat");
      SeqPtr c = asSeq(args[1], site, "concat");
      charge(seqCost(*a, len(*a) + 1, 1));
      std::vector<Value> elems;
      elems.reserve(a->len + c->len);
      for (std::size_t k = 0; k < a->len; ++k)
        elems.push_back(a->at(k));
      for (std::size_t k = 0; k < c->len; ++k)
        elems.push_back(c->at(k));
      return makeSequence(std::move(elems), a->rep);
    }
    case Builtin::Subsequence: {
      SeqPtr s = asSeq(args[0], site, "subsequence");
      std::int64_t i = std::clamp<std::int64_t>(
          asInt(args[1], site, "subsequence"), 0, len(*s));
      std::int64_t n = std::clamp<std::int64_t>(
          asInt(args[2], site, "subsequence"), 0, len(*s) - i);
      charge(seqCost(*s, i + n + 1, 2));
      auto out = std::make_shared<Sequence>(*s);
      out->begin = s->begin + s->len - static_cast<std::size_t>(i + n);
      out->len = static_cast<std::size_t>(n);
      return SeqPtr(std::move(out));
    }
    case Builtin::CreateList:
    case Builtin::CreateRope: {
      std::int64_t n = asInt(args[0], site, "create");
      if (n < 0)
        throw RuntimeError(where(site) + "negative sequence length");
      charge(n + 1);
      std::vector<Value> elems;
      elems.reserve(static_cast<std::size_t>(n));
      for (std::int64_t k = 0; k < n; ++k)
        elems.push_back(apply(args[1], k, site));
      return makeSequence(std::move(elems), b.id == Builtin::CreateList
                                                ? SeqRep::List
                                                : SeqRep::Rope);
    }
    case Builtin::Reverse: {
      SeqPtr s = asSeq(args[0], site, "reverse");
      charge(len(*s) + 1);
      std::vector<Value> elems;
      elems.reserve(s->len);
      for (std::size_t k = s->len; k-- > 0;)
        elems.push_back(s->at(k));
      return makeSequence(std::move(elems), s->rep);
    }
    case Builtin::ParMap: {
      std::int64_t chunk = asInt(args[0], site, "parMap");
      if (chunk <= 0)
        throw RuntimeError(where(site) + "parMap chunk size must be positive");
      SeqPtr s = asSeq(args[2], site, "parMap");
      std::int64_t before = stats_.steps;
      std::int64_t longest = 0, chunks = 0;
      std::vector<Value> out;
      out.reserve(s->len);
      ++parDepth_;
      for (std::size_t k = 0; k < s->len;) {
        std::int64_t chunkStart = stats_.steps;
        for (std::int64_t c = 0; c < chunk && k < s->len; ++c, ++k)
          out.push_back(apply(args[1], s->at(k), site));
        longest = std::max(longest, stats_.steps - chunkStart);
        ++chunks;
      }
      --parDepth_;
      stats_.steps =
          before + kParMapFixedCost + chunks * kParMapChunkCost + longest;
      return makeSequence(std::move(out), s->rep);
    }
    case Builtin::Assert:
      charge(1);
      if (!asBool(args[0], site, "assert") && opt_.checkAsserts)
        throw AssertFailure(where(site) + "assertion failed");
      return true;
    case Builtin::ArgInt: {
      charge(1);
      std::int64_t k = asInt(args[0], site, "argInt");
      if (k < 0 || static_cast<std::size_t>(k) >= opt_.args.size())
        throw RuntimeError(where(site) + "missing program argument " +
                           std::to_string(k));
      return opt_.args[static_cast<std::size_t>(k)];
    }
    case Builtin::NewCell:
      charge(1);
      return std::make_shared<Cell>(Cell{std::move(args[0])});
    case Builtin::Deref: {
      charge(1);
      ++stats_.cellReads;
      auto c = std::get_if<std::shared_ptr<Cell>>(&args[0]);
      if (!c)
        throw RuntimeError(where(site) + "deref expects a cell");
      return (*c)->value;
    }
    case Builtin::SetCell: {
      charge(1);
      ++stats_.cellWrites;
      auto c = std::get_if<std::shared_ptr<Cell>>(&args[0]);
      if (!c)
        throw RuntimeError(where(site) + "setCell expects a cell");
      (*c)->value = args[1];
      return args[1];
    }
    case Builtin::NewArray: {
      charge(1);
      std::int64_t n = asInt(args[0], site, "newArray");
      if (n < 0)
        throw RuntimeError(where(site) + "negative array size");
      auto a = std::make_shared<Array>();
      a->slots.assign(static_cast<std::size_t>(n), args[1]);
      return a;
    }
    case Builtin::ArrayGet:
    case Builtin::ArraySet: {
      charge(1);
      auto a = std::get_if<std::shared_ptr<Array>>(&args[0]);
      if (!a)
        throw RuntimeError(where(site) + "array intrinsic expects an array");
      std::int64_t i = asInt(args[1], site, "array index");
      if (i < 0 || static_cast<std::size_t>(i) >= (*a)->slots.size())
        throw RuntimeError(where(site) + "array index out of bounds");
      auto &slot = (*a)->slots[static_cast<std::size_t>(i)];
      if (b.id == Builtin::ArrayGet) {
        ++stats_.cellReads;
        return slot;
      }
      ++stats_.cellWrites;
      slot = args[2];
      return args[2];
    }
    case Builtin::ThreadId:
      charge(1);
      return opt_.threadId;
    case Builtin::HoleValue: {
      std::int64_t k = asInt(args[0], site, "holeValue");
      if (k < 0 || static_cast<std::size_t>(k) >= opt_.slots.size())
        throw RuntimeError(where(site) + "no value for hole slot " +
                           std::to_string(k));
      return opt_.slots[static_cast<std::size_t>(k)];
    }
    case Builtin::AcquireLock:
    case Builtin::ReleaseLock: {
      std::int64_t i = asInt(args[0], site, "lock");
      // Id 0 marks a point instance without dependencies; it is never timed.
      if (i == 0)
        return i;
      if (i < 1 || static_cast<std::size_t>(i) > instr_.log.size())
        throw RuntimeError(where(site) + "unknown measuring point " +
                           std::to_string(i));
      // Points reached inside parMap chunks run on a per-chunk timeline and
      // are attributed to the enclosing point instead.
      if (parDepth_ > 0)
        return i;
      auto slot = static_cast<std::size_t>(i - 1);
      if (b.id == Builtin::AcquireLock) {
        if (instr_.lock == 0) {
          instr_.lock = i;
          instr_.start[slot] = now();
        }
      } else if (instr_.lock == i) {
        instr_.lock = 0;
        instr_.log[slot].cost += now() - instr_.start[slot];
        ++instr_.log[slot].count;
      }
      return i;
    }
    }
    throw RuntimeError(where(site) + "unhandled builtin");
  }

  const Program &program_;
  const EvalOptions &opt_;
  Bindings bindings_;
  EvalStats stats_;
  InstrumentationState instr_;
  std::chrono::steady_clock::time_point started_;
  std::int64_t depth_ = 0;
  int parDepth_ = 0;
};

struct ThreadTask {
  const Program *program;
  const EvalOptions *options;
  EvalResult result;
  std::exception_ptr error;
};

void *runTask(void *p) {
  auto *task = static_cast<ThreadTask *>(p);
  try {
    Machine m(*task->program, *task->options);
    task->result = m.run();
  } catch (...) {
    task->error = std::current_exception();
  }
  return nullptr;
}

constexpr std::size_t kEvalStack = std::size_t{1} << 30;

} // namespace

EvalResult evaluate(const Program &program, const EvalOptions &options) {
  ThreadTask task{&program, &options, EvalResult{}, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kEvalStack);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, runTask, &task);
  pthread_attr_destroy(&attr);
  if (rc != 0) {
    runTask(&task);
  } else {
    pthread_join(thread, nullptr);
  }
  if (task.error)
    std::rethrow_exception(task.error);
  return std::move(task.result);
}

} // namespace holetune
