#include "scomma/solver.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <deque>
#include <limits>
#include <map>
#include <set>

#include "scomma/eval.hpp"

namespace scomma {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ", ") + i;
  return s;
}

using i128 = __int128;

constexpr std::int64_t kBitsLimit = 1 << 14;

i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

i128 ceil_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
  return q;
}

std::int64_t clamp64(i128 v) {
  constexpr auto lo = std::numeric_limits<std::int64_t>::min() / 4;
  constexpr auto hi = std::numeric_limits<std::int64_t>::max() / 4;
  return v < lo ? lo : v > hi ? hi : static_cast<std::int64_t>(v);
}

}  // namespace

Unsupported::Unsupported(std::vector<std::string> constructs)
    : Error("not supported by the embedded solver: " + join(constructs)), constructs_(std::move(constructs)) {}

/// Integer domain: bounds, plus a bitset of members when the range is small.
/// `lo` and `hi` are always members.
struct IntDom {
  std::int64_t lo = 0;
  std::int64_t hi = -1;
  std::int64_t base = 0;
  std::vector<std::uint64_t> bits;

  static IntDom range(std::int64_t lo, std::int64_t hi) {
    IntDom d;
    d.lo = lo;
    d.hi = hi;
    d.base = lo;
    if (hi >= lo && hi - lo < kBitsLimit) d.bits.assign(static_cast<std::size_t>((hi - lo) / 64 + 1), ~0ULL);
    return d;
  }

  static IntDom of(const IntSet& values) {
    IntDom d = range(values.front(), values.back());
    if (d.bits.empty()) return d;
    std::fill(d.bits.begin(), d.bits.end(), 0ULL);
    for (auto v : values) d.set_bit(v);
    return d;
  }

  bool test(std::int64_t v) const {
    auto k = static_cast<std::uint64_t>(v - base);
    return (bits[k >> 6] >> (k & 63)) & 1ULL;
  }
  void set_bit(std::int64_t v) {
    auto k = static_cast<std::uint64_t>(v - base);
    bits[k >> 6] |= 1ULL << (k & 63);
  }
  void clear_bit(std::int64_t v) {
    auto k = static_cast<std::uint64_t>(v - base);
    bits[k >> 6] &= ~(1ULL << (k & 63));
  }

  bool contains(std::int64_t v) const { return v >= lo && v <= hi && (bits.empty() || test(v)); }
  bool fixed() const { return lo == hi; }

  std::uint64_t size() const {
    if (bits.empty()) return static_cast<std::uint64_t>(hi - lo) + 1;
    std::uint64_t n = 0;
    auto first = static_cast<std::uint64_t>(lo - base), last = static_cast<std::uint64_t>(hi - base);
    for (auto w = first >> 6; w <= last >> 6; ++w) {
      std::uint64_t word = bits[w];
      if (w == first >> 6) word &= ~0ULL << (first & 63);
      if (w == last >> 6 && (last & 63) != 63) word &= (1ULL << ((last & 63) + 1)) - 1;
      n += static_cast<std::uint64_t>(std::popcount(word));
    }
    return n;
  }

  template <class F>
  void for_each(F&& f) const {
    for (auto v = lo; v <= hi; ++v)
      if (bits.empty() || test(v)) f(v);
  }

  bool enumerable() const { return !bits.empty(); }
};

class Space;

class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual bool propagate(Space& s) = 0;
  std::vector<int> vars;
};

class Space {
 public:
  std::vector<IntDom> doms;
  std::vector<int> stamp;
  std::vector<std::vector<int>> watchers;
  std::vector<std::unique_ptr<Propagator>> props;

  struct TrailEntry {
    int var;
    int old_stamp;
    IntDom old;
  };
  std::vector<TrailEntry> trail;
  std::vector<std::size_t> marks;
  int level = 0;

  std::deque<int> queue;
  std::vector<char> queued;
  std::uint64_t propagations = 0;
  bool root_failed = false;

  // model data owned by the space
  FlatModel model;
  std::vector<int> decision;
  std::map<std::string, std::vector<int>> arrays;
  std::size_t groups = 0;

  // objective bound used by branch and bound
  bool optimizing = false;
  int objective_var = -1;
  bool minimize = true;
  std::optional<std::int64_t> bound;

  int new_var(IntDom d) {
    doms.push_back(std::move(d));
    stamp.push_back(-1);
    watchers.emplace_back();
    return static_cast<int>(doms.size()) - 1;
  }

  void add(std::unique_ptr<Propagator> p) {
    int id = static_cast<int>(props.size());
    std::set<int> seen;
    for (int v : p->vars)
      if (seen.insert(v).second) watchers[static_cast<std::size_t>(v)].push_back(id);
    props.push_back(std::move(p));
    queued.push_back(0);
    schedule(id);
  }

  void schedule(int p) {
    if (queued[static_cast<std::size_t>(p)]) return;
    queued[static_cast<std::size_t>(p)] = 1;
    queue.push_back(p);
  }

  const IntDom& dom(int x) const { return doms[static_cast<std::size_t>(x)]; }
  std::int64_t lo(int x) const { return dom(x).lo; }
  std::int64_t hi(int x) const { return dom(x).hi; }
  bool fixed(int x) const { return dom(x).fixed(); }

  IntDom& save(int x) {
    auto ux = static_cast<std::size_t>(x);
    if (stamp[ux] != level) {
      trail.push_back({x, stamp[ux], doms[ux]});
      stamp[ux] = level;
    }
    return doms[ux];
  }

  void changed(int x) {
    for (int p : watchers[static_cast<std::size_t>(x)]) schedule(p);
  }

  bool set_min(int x, i128 v128) {
    const IntDom& d = dom(x);
    if (v128 <= d.lo) return true;
    if (v128 > d.hi) return false;
    auto v = static_cast<std::int64_t>(v128);
    IntDom& m = save(x);
    m.lo = v;
    if (!m.bits.empty())
      while (!m.test(m.lo)) ++m.lo;
    changed(x);
    return true;
  }

  bool set_max(int x, i128 v128) {
    const IntDom& d = dom(x);
    if (v128 >= d.hi) return true;
    if (v128 < d.lo) return false;
    auto v = static_cast<std::int64_t>(v128);
    IntDom& m = save(x);
    m.hi = v;
    if (!m.bits.empty())
      while (!m.test(m.hi)) --m.hi;
    changed(x);
    return true;
  }

  bool remove(int x, std::int64_t v) {
    const IntDom& d = dom(x);
    if (!d.contains(v)) return true;
    if (d.fixed()) return false;
    if (v == d.lo) return set_min(x, v + 1);
    if (v == d.hi) return set_max(x, v - 1);
    if (d.bits.empty()) return true;  // interior holes are not represented
    IntDom& m = save(x);
    m.clear_bit(v);
    changed(x);
    return true;
  }

  bool assign(int x, std::int64_t v) {
    const IntDom& d = dom(x);
    if (!d.contains(v)) return false;
    if (d.fixed()) return true;
    IntDom& m = save(x);
    m.lo = m.hi = v;
    changed(x);
    return true;
  }

  void push_level() {
    marks.push_back(trail.size());
    ++level;
  }

  void pop_level() {
    std::size_t mark = marks.back();
    marks.pop_back();
    while (trail.size() > mark) {
      auto& e = trail.back();
      doms[static_cast<std::size_t>(e.var)] = std::move(e.old);
      stamp[static_cast<std::size_t>(e.var)] = e.old_stamp;
      trail.pop_back();
    }
    --level;
  }

  bool apply_bound() {
    if (!bound || objective_var < 0) return true;
    return minimize ? set_max(objective_var, static_cast<i128>(*bound) - 1)
                    : set_min(objective_var, static_cast<i128>(*bound) + 1);
  }

  bool propagate() {
    if (root_failed || !apply_bound()) {
      clear_queue();
      return false;
    }
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop_front();
      queued[static_cast<std::size_t>(p)] = 0;
      ++propagations;
      if (!props[static_cast<std::size_t>(p)]->propagate(*this)) {
        clear_queue();
        return false;
      }
    }
    return true;
  }

  void clear_queue() {
    for (int p : queue) queued[static_cast<std::size_t>(p)] = 0;
    queue.clear();
  }
};

namespace {

// --- propagators ------------------------------------------------------------------

struct Term {
  std::int64_t coef;
  int var;
};

/// b <-> (sum(coef * var) + c  REL  0), flipped when `negated`.
class LinearReif : public Propagator {
 public:
  enum class Rel { Le, Eq };

  LinearReif(std::vector<Term> terms, std::int64_t c, Rel rel, int b, bool negated)
      : terms_(std::move(terms)), c_(c), rel_(rel), b_(b), negated_(negated) {
    for (const auto& t : terms_) vars.push_back(t.var);
    vars.push_back(b_);
  }

  bool propagate(Space& s) override {
    i128 mn = c_, mx = c_;
    bounds(s, mn, mx);
    int status = -1;  // 1 true, 0 false, -1 unknown
    if (rel_ == Rel::Le) {
      if (mx <= 0) status = 1;
      if (mn > 0) status = 0;
    } else {
      if (mn == 0 && mx == 0) status = 1;
      if (mn > 0 || mx < 0) status = 0;
    }
    if (status >= 0) return s.assign(b_, (status == 1) != negated_ ? 1 : 0);
    if (!s.fixed(b_)) return true;
    bool want = (s.lo(b_) == 1) != negated_;
    if (rel_ == Rel::Le) {
      if (want) return enforce_le(s, terms_, c_);
      std::vector<Term> neg;
      for (const auto& t : terms_) neg.push_back({-t.coef, t.var});
      return enforce_le(s, neg, -c_ + 1);
    }
    return want ? enforce_eq(s) : enforce_ne(s);
  }

 private:
  void bounds(const Space& s, i128& mn, i128& mx) const {
    for (const auto& t : terms_) {
      i128 a = static_cast<i128>(t.coef) * s.lo(t.var), b = static_cast<i128>(t.coef) * s.hi(t.var);
      mn += std::min(a, b);
      mx += std::max(a, b);
    }
  }

  static bool enforce_le(Space& s, const std::vector<Term>& terms, std::int64_t c) {
    i128 mn = c;
    for (const auto& t : terms) mn += t.coef > 0 ? static_cast<i128>(t.coef) * s.lo(t.var) : static_cast<i128>(t.coef) * s.hi(t.var);
    if (mn > 0) return false;
    for (const auto& t : terms) {
      i128 own = t.coef > 0 ? static_cast<i128>(t.coef) * s.lo(t.var) : static_cast<i128>(t.coef) * s.hi(t.var);
      i128 room = -(mn - own);  // coef * x <= room
      bool ok = t.coef > 0 ? s.set_max(t.var, floor_div(room, t.coef)) : s.set_min(t.var, ceil_div(room, t.coef));
      if (!ok) return false;
    }
    return true;
  }

  bool enforce_eq(Space& s) {
    if (!enforce_le(s, terms_, c_)) return false;
    std::vector<Term> neg;
    for (const auto& t : terms_) neg.push_back({-t.coef, t.var});
    if (!enforce_le(s, neg, -c_)) return false;
    // Domain pruning for x + k*y + c = 0 shapes with enumerable domains.
    std::vector<const Term*> open;
    i128 fixed_sum = c_;
    for (const auto& t : terms_) {
      if (s.fixed(t.var))
        fixed_sum += static_cast<i128>(t.coef) * s.lo(t.var);
      else
        open.push_back(&t);
    }
    if (open.size() == 1) {
      const Term& t = *open[0];
      if (fixed_sum % t.coef != 0) return false;
      return s.assign(t.var, static_cast<std::int64_t>(-fixed_sum / t.coef));
    }
    if (open.size() == 2) {
      for (int k = 0; k < 2; ++k) {
        const Term& x = *open[static_cast<std::size_t>(k)];
        const Term& y = *open[static_cast<std::size_t>(1 - k)];
        if (!s.dom(x.var).enumerable() || !s.dom(y.var).enumerable()) continue;
        std::vector<std::int64_t> drop;
        s.dom(x.var).for_each([&](std::int64_t v) {
          i128 r = -(fixed_sum + static_cast<i128>(x.coef) * v);
          if (r % y.coef != 0 || !s.dom(y.var).contains(static_cast<std::int64_t>(r / y.coef))) drop.push_back(v);
        });
        for (auto v : drop)
          if (!s.remove(x.var, v)) return false;
      }
    }
    return true;
  }

  bool enforce_ne(Space& s) {
    const Term* open = nullptr;
    int n_open = 0;
    i128 fixed_sum = c_;
    for (const auto& t : terms_) {
      if (s.fixed(t.var)) {
        fixed_sum += static_cast<i128>(t.coef) * s.lo(t.var);
      } else {
        open = &t;
        ++n_open;
      }
    }
    if (n_open == 0) return fixed_sum != 0;
    if (n_open == 1 && fixed_sum % open->coef == 0) return s.remove(open->var, static_cast<std::int64_t>(-fixed_sum / open->coef));
    return true;
  }

  std::vector<Term> terms_;
  std::int64_t c_;
  Rel rel_;
  int b_;
  bool negated_;
};

/// z = x * y
class Times : public Propagator {
 public:
  Times(int z, int x, int y) : z_(z), x_(x), y_(y) { vars = {z, x, y}; }

  bool propagate(Space& s) override {
    i128 p[4] = {static_cast<i128>(s.lo(x_)) * s.lo(y_), static_cast<i128>(s.lo(x_)) * s.hi(y_),
                 static_cast<i128>(s.hi(x_)) * s.lo(y_), static_cast<i128>(s.hi(x_)) * s.hi(y_)};
    if (!s.set_min(z_, *std::min_element(p, p + 4)) || !s.set_max(z_, *std::max_element(p, p + 4))) return false;
    if (!divide(s, x_, y_) || !divide(s, y_, x_)) return false;
    if (s.fixed(x_) && s.fixed(y_)) return s.assign(z_, s.lo(x_) * s.lo(y_));
    return true;
  }

 private:
  // When `f` is fixed and non-zero, bound `o` by z / f.
  bool divide(Space& s, int o, int f) {
    if (!s.fixed(f) || s.lo(f) == 0) return true;
    i128 k = s.lo(f);
    i128 a = s.lo(z_), b = s.hi(z_);
    if (k > 0) return s.set_min(o, ceil_div(a, k)) && s.set_max(o, floor_div(b, k));
    return s.set_min(o, ceil_div(b, k)) && s.set_max(o, floor_div(a, k));
  }

  int z_, x_, y_;
};

/// z = arr[idx] with 1-based idx.
class Element : public Propagator {
 public:
  Element(int z, std::vector<int> arr, int idx) : z_(z), arr_(std::move(arr)), idx_(idx) {
    vars = arr_;
    vars.push_back(z);
    vars.push_back(idx);
  }

  bool propagate(Space& s) override {
    const auto n = static_cast<std::int64_t>(arr_.size());
    if (!s.set_min(idx_, 1) || !s.set_max(idx_, n)) return false;
    std::vector<std::int64_t> drop;
    i128 zmin = std::numeric_limits<std::int64_t>::max(), zmax = std::numeric_limits<std::int64_t>::min();
    s.dom(idx_).for_each([&](std::int64_t i) {
      int a = cell(i);
      if (!overlaps(s.dom(a), s.dom(z_))) {
        drop.push_back(i);
      } else {
        zmin = std::min<i128>(zmin, s.lo(a));
        zmax = std::max<i128>(zmax, s.hi(a));
      }
    });
    for (auto i : drop)
      if (!s.remove(idx_, i)) return false;
    if (!s.set_min(z_, zmin) || !s.set_max(z_, zmax)) return false;
    if (s.fixed(idx_)) {
      int a = cell(s.lo(idx_));
      if (!s.set_min(a, s.lo(z_)) || !s.set_max(a, s.hi(z_))) return false;
      if (!s.set_min(z_, s.lo(a)) || !s.set_max(z_, s.hi(a))) return false;
      if (s.dom(z_).enumerable()) {
        std::vector<std::int64_t> zdrop;
        s.dom(z_).for_each([&](std::int64_t v) {
          if (!s.dom(a).contains(v)) zdrop.push_back(v);
        });
        for (auto v : zdrop)
          if (!s.remove(z_, v)) return false;
      }
      if (s.dom(a).enumerable()) {
        std::vector<std::int64_t> adrop;
        s.dom(a).for_each([&](std::int64_t v) {
          if (!s.dom(z_).contains(v)) adrop.push_back(v);
        });
        for (auto v : adrop)
          if (!s.remove(a, v)) return false;
      }
    } else if (s.dom(z_).enumerable() && s.dom(z_).size() <= 256) {
      std::vector<std::int64_t> zdrop;
      s.dom(z_).for_each([&](std::int64_t v) {
        bool supported = false;
        s.dom(idx_).for_each([&](std::int64_t i) { supported = supported || s.dom(cell(i)).contains(v); });
        if (!supported) zdrop.push_back(v);
      });
      for (auto v : zdrop)
        if (!s.remove(z_, v)) return false;
    }
    return true;
  }

 private:
  int cell(std::int64_t i) const { return arr_[static_cast<std::size_t>(i - 1)]; }

  static bool overlaps(const IntDom& a, const IntDom& b) {
    if (a.hi < b.lo || b.hi < a.lo) return false;
    const IntDom& small = a.size() <= b.size() ? a : b;
    const IntDom& other = &small == &a ? b : a;
    if (!small.enumerable() || small.size() > 512) return true;
    bool hit = false;
    small.for_each([&](std::int64_t v) { hit = hit || other.contains(v); });
    return hit;
  }

  int z_;
  std::vector<int> arr_;
  int idx_;
};

/// b = f(x, y) over 0/1 variables; y < 0 for unary functions.
class BoolFn : public Propagator {
 public:
  BoolFn(int b, int x, int y, unsigned table) : b_(b), x_(x), y_(y), table_(table) {
    vars = {b, x};
    if (y >= 0) vars.push_back(y);
  }

  bool propagate(Space& s) override {
    bool sup_b[2] = {false, false}, sup_x[2] = {false, false}, sup_y[2] = {false, false};
    for (int x = 0; x < 2; ++x) {
      if (!s.dom(x_).contains(x)) continue;
      for (int y = 0; y < 2; ++y) {
        if (y_ >= 0 && !s.dom(y_).contains(y)) continue;
        if (y_ < 0 && y == 1) continue;
        int b = (table_ >> (x * 2 + y)) & 1U;
        if (!s.dom(b_).contains(b)) continue;
        sup_b[b] = sup_x[x] = sup_y[y] = true;
      }
    }
    for (int v = 0; v < 2; ++v) {
      if (!sup_b[v] && !s.remove(b_, v)) return false;
      if (!sup_x[v] && !s.remove(x_, v)) return false;
      if (y_ >= 0 && !sup_y[v] && !s.remove(y_, v)) return false;
    }
    return true;
  }

 private:
  int b_, x_, y_;
  unsigned table_;  // bit (x*2 + y) holds f(x, y)
};

/// b <-> x in values
class InSet : public Propagator {
 public:
  InSet(int b, int x, IntSet values) : b_(b), x_(x), values_(std::move(values)) { vars = {b, x}; }

  bool propagate(Space& s) override {
    const IntDom& d = s.dom(x_);
    bool all = true, any = false;
    if (d.enumerable() || d.size() <= 4096) {
      d.for_each([&](std::int64_t v) {
        bool in = std::binary_search(values_.begin(), values_.end(), v);
        all = all && in;
        any = any || in;
      });
    } else {
      all = false;
      any = true;
    }
    if (all) return s.assign(b_, 1);
    if (!any) return s.assign(b_, 0);
    if (!s.fixed(b_)) return true;
    if (s.lo(b_) == 1) {
      auto first = std::lower_bound(values_.begin(), values_.end(), s.lo(x_));
      auto last = std::upper_bound(values_.begin(), values_.end(), s.hi(x_));
      if (first == last) return false;
      if (!s.set_min(x_, *first) || !s.set_max(x_, *(last - 1))) return false;
      std::vector<std::int64_t> drop;
      s.dom(x_).for_each([&](std::int64_t v) {
        if (!std::binary_search(values_.begin(), values_.end(), v)) drop.push_back(v);
      });
      for (auto v : drop)
        if (!s.remove(x_, v)) return false;
      return true;
    }
    for (auto v : values_)
      if (!s.remove(x_, v)) return false;
    return true;
  }

 private:
  int b_, x_;
  IntSet values_;
};

/// Pairwise disequality plus a pigeonhole count.
class AllDifferent : public Propagator {
 public:
  explicit AllDifferent(std::vector<int> xs) { vars = std::move(xs); }

  bool propagate(Space& s) override {
    bool again = true;
    while (again) {
      again = false;
      for (std::size_t i = 0; i < vars.size(); ++i) {
        if (!s.fixed(vars[i])) continue;
        auto v = s.lo(vars[i]);
        for (std::size_t j = 0; j < vars.size(); ++j) {
          if (j == i || vars[j] == vars[i]) continue;
          if (!s.dom(vars[j]).contains(v)) continue;
          bool was_fixed = s.fixed(vars[j]);
          if (!s.remove(vars[j], v)) return false;
          if (!was_fixed && s.fixed(vars[j])) again = true;
        }
      }
    }
    // pigeonhole over the union of the domains
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    bool enumerable = true;
    for (int x : vars) {
      lo = std::min(lo, s.lo(x));
      hi = std::max(hi, s.hi(x));
      enumerable = enumerable && s.dom(x).enumerable();
    }
    std::uint64_t distinct;
    if (enumerable && hi - lo < kBitsLimit) {
      std::vector<char> seen(static_cast<std::size_t>(hi - lo + 1), 0);
      for (int x : vars) s.dom(x).for_each([&](std::int64_t v) { seen[static_cast<std::size_t>(v - lo)] = 1; });
      distinct = static_cast<std::uint64_t>(std::count(seen.begin(), seen.end(), 1));
    } else {
      distinct = static_cast<std::uint64_t>(hi - lo) + 1;
    }
    std::set<int> unique(vars.begin(), vars.end());
    return distinct >= unique.size();
  }
};

// --- compilation -------------------------------------------------------------------------

struct Lin {
  std::map<int, std::int64_t> terms;
  std::int64_t c = 0;

  void add(const Lin& o, std::int64_t k) {
    for (const auto& [v, a] : o.terms) {
      terms[v] += a * k;
      if (terms[v] == 0) terms.erase(v);
    }
    c += o.c * k;
  }
  bool constant() const { return terms.empty(); }
};

void scan_unsupported(const FlatModel& fm, std::vector<std::string>& out) {
  auto note = [&](const std::string& s) {
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  };
  for (const auto& v : fm.variables) {
    if (v.base == FlatBase::Real) note("real-valued decision variables ('" + v.name + "')");
    if (v.base == FlatBase::SetOfInt) note("set-of-int decision variables ('" + v.name + "')");
  }
  for (const auto& t : fm.tables)
    for (const auto& val : t.values)
      if (val.is_real() || val.is_set()) {
        note("non-integer table '" + t.name + "'");
        break;
      }
  auto scan = [&](const ExprPtr& e) {
    visit(e, [&](const Expr& x) {
      if (x.kind == ExprKind::RealLit) note("real-valued expressions");
      if (x.kind == ExprKind::Field) note("object references");
      if (x.kind == ExprKind::Binary && (is_set_operation(x.op) || x.op == Op::Subset || x.op == Op::Superset))
        note("set expressions ('" + std::string(op_symbol(x.op)) + "')");
      if (x.kind == ExprKind::Binary && x.op == Op::In && x.args[1]->kind != ExprKind::SetLit)
        note("membership in a non-literal set");
      if (x.kind == ExprKind::SetLit)
        for (const auto& a : x.args)
          if (a->kind != ExprKind::IntLit) note("set literals with non-constant elements");
      if (x.kind == ExprKind::Call && x.name != "alldifferent") note("'" + x.name + "'");
    });
  };
  for (const auto& c : fm.constraints) scan(c.expr);
  if (fm.objective) scan(fm.objective->expr);
}

class Compiler {
 public:
  Compiler(Space& s, const FlatModel& fm) : s_(s), fm_(fm) {}

  std::vector<int> decision;                      // all decision element ids
  std::map<std::string, std::vector<int>> arrays;  // var name -> element ids

  void declare() {
    for (const auto& v : fm_.variables) {
      IntDom d;
      if (v.base == FlatBase::Bool)
        d = IntDom::range(0, 1);
      else if (v.domain.kind == Domain::Kind::IntSet)
        d = IntDom::of(v.domain.values);
      else
        d = IntDom::range(v.domain.lo, v.domain.hi);
      if (d.hi < d.lo) {
        s_.root_failed = true;
        d = IntDom::range(0, 0);
      }
      std::vector<int> ids;
      for (std::int64_t i = 0; i < v.size(); ++i) ids.push_back(s_.new_var(d));
      decision.insert(decision.end(), ids.begin(), ids.end());
      arrays[v.name] = std::move(ids);
    }
  }

  void post_true(const ExprPtr& e) {
    const Expr& x = *e;
    if (x.kind == ExprKind::BoolLit) {
      if (!x.bool_value) s_.root_failed = true;
      return;
    }
    if (x.kind == ExprKind::Binary && x.op == Op::And) {
      post_true(x.args[0]);
      post_true(x.args[1]);
      return;
    }
    if (x.kind == ExprKind::Call && x.name == "alldifferent") {
      std::vector<int> vs;
      for (const auto& a : x.args) {
        if (a->kind == ExprKind::Name && arrays.count(a->name)) {
          const auto& ids = arrays.at(a->name);
          vs.insert(vs.end(), ids.begin(), ids.end());
        } else if (a->kind == ExprKind::Name && fm_.find_table(a->name)) {
          for (int id : table(a->name)) vs.push_back(id);
        } else {
          vs.push_back(int_var(a));
        }
      }
      s_.add(std::make_unique<AllDifferent>(std::move(vs)));
      return;
    }
    if (x.kind == ExprKind::Binary && is_comparison(x.op)) {
      comparison(x, one());
      return;
    }
    int b = bool_var(e);
    if (!s_.assign(b, 1)) s_.root_failed = true;
  }

  int objective(const ExprPtr& e) { return int_var(e); }

  int one() { return constant(1); }

 private:
  int constant(std::int64_t v) {
    auto it = constants_.find(v);
    if (it != constants_.end()) return it->second;
    int id = s_.new_var(IntDom::range(v, v));
    constants_[v] = id;
    return id;
  }

  int fresh_bool() { return s_.new_var(IntDom::range(0, 1)); }

  const std::vector<int>& table(const std::string& name) {
    auto it = tables_.find(name);
    if (it != tables_.end()) return it->second;
    std::vector<int> ids;
    for (const auto& v : fm_.find_table(name)->values) ids.push_back(constant(v.as_int()));
    return tables_[name] = std::move(ids);
  }

  std::pair<const std::vector<int>*, std::vector<std::int64_t>> array_of(const std::string& name) {
    if (auto v = fm_.find_var(name)) return {&arrays.at(name), v->dims};
    if (auto t = fm_.find_table(name)) return {&table(name), t->dims};
    throw ContractError("unknown name '" + name + "'");
  }

  /// Variable for the element at a subscript expression.
  int access(const Expr& e) {
    const Expr& base = e.arg(0);
    auto [cells, dims] = array_of(base.name);
    std::size_t n = e.args.size() - 1;
    if (n != dims.size()) throw ContractError("wrong number of subscripts in '" + to_string(std::make_shared<Expr>(e)) + "'");
    bool constant_index = true;
    for (std::size_t i = 1; i < e.args.size(); ++i) constant_index = constant_index && e.args[i]->kind == ExprKind::IntLit;
    if (constant_index) {
      std::int64_t offset = 0;
      for (std::size_t i = 0; i < n; ++i) {
        auto k = e.args[i + 1]->int_value;
        if (k < 1 || k > dims[i]) {
          s_.root_failed = true;  // the evaluator rejects every assignment
          return constant(0);
        }
        offset = offset * dims[i] + (k - 1);
      }
      return (*cells)[static_cast<std::size_t>(offset)];
    }
    int idx;
    if (n == 1) {
      idx = int_var(e.args[1]);
    } else {
      int i = int_var(e.args[1]);
      int j = int_var(e.args[2]);
      if (!s_.set_min(i, 1) || !s_.set_max(i, dims[0]) || !s_.set_min(j, 1) || !s_.set_max(j, dims[1]))
        s_.root_failed = true;
      Lin lin;
      lin.terms[i] = dims[1];
      lin.terms[j] += 1;
      lin.c = -dims[1];
      idx = materialize(lin);
    }
    std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
    for (int c : *cells) {
      lo = std::min(lo, s_.lo(c));
      hi = std::max(hi, s_.hi(c));
    }
    int z = s_.new_var(IntDom::range(lo, hi));
    s_.add(std::make_unique<Element>(z, *cells, idx));
    return z;
  }

  Lin linear(const ExprPtr& ep) {
    const Expr& e = *ep;
    Lin out;
    switch (e.kind) {
      case ExprKind::IntLit: out.c = e.int_value; return out;
      case ExprKind::BoolLit: out.c = e.bool_value ? 1 : 0; return out;
      case ExprKind::Name: {
        if (auto t = fm_.find_table(e.name)) {
          out.c = t->values.at(0).as_int();
          return out;
        }
        auto it = arrays.find(e.name);
        if (it == arrays.end()) throw ContractError("unknown name '" + e.name + "'");
        if (it->second.size() != 1 || !fm_.find_var(e.name)->dims.empty())
          throw ContractError("array '" + e.name + "' used without subscript");
        out.terms[it->second[0]] = 1;
        return out;
      }
      case ExprKind::Index: out.terms[access(e)] = 1; return out;
      case ExprKind::Unary:
        if (e.op == Op::Neg) {
          out.add(linear(e.args[0]), -1);
          return out;
        }
        break;
      case ExprKind::Binary:
        switch (e.op) {
          case Op::Add:
          case Op::Sub: {
            out = linear(e.args[0]);
            out.add(linear(e.args[1]), e.op == Op::Add ? 1 : -1);
            return out;
          }
          case Op::Mul: {
            Lin a = linear(e.args[0]), b = linear(e.args[1]);
            if (a.constant()) {
              out.add(b, a.c);
              return out;
            }
            if (b.constant()) {
              out.add(a, b.c);
              return out;
            }
            int x = materialize(a), y = materialize(b);
            i128 p[4] = {static_cast<i128>(s_.lo(x)) * s_.lo(y), static_cast<i128>(s_.lo(x)) * s_.hi(y),
                         static_cast<i128>(s_.hi(x)) * s_.lo(y), static_cast<i128>(s_.hi(x)) * s_.hi(y)};
            int z = s_.new_var(IntDom::range(clamp64(*std::min_element(p, p + 4)), clamp64(*std::max_element(p, p + 4))));
            s_.add(std::make_unique<Times>(z, x, y));
            out.terms[z] = 1;
            return out;
          }
          case Op::Div: {
            Lin a = linear(e.args[0]), b = linear(e.args[1]);
            if (b.constant() && b.c == 0) {
              s_.root_failed = true;
              return out;
            }
            if (a.constant() && b.constant()) {
              if (a.c % b.c != 0) s_.root_failed = true;
              out.c = b.c == 0 ? 0 : a.c / b.c;
              return out;
            }
            int x = materialize(a);
            std::int64_t m = std::max(std::abs(s_.lo(x)), std::abs(s_.hi(x)));
            int q = s_.new_var(IntDom::range(-m, m));
            if (b.constant()) {
              // q * k = x
              std::vector<Term> t = {{b.c, q}, {-1, x}};
              s_.add(std::make_unique<LinearReif>(std::move(t), 0, LinearReif::Rel::Eq, one(), false));
            } else {
              int y = materialize(b);
              if (!s_.remove(y, 0)) s_.root_failed = true;
              s_.add(std::make_unique<Times>(x, q, y));
            }
            out.terms[q] = 1;
            return out;
          }
          default: break;
        }
        break;
      default: break;
    }
    if (e.kind == ExprKind::Unary || e.kind == ExprKind::Binary) {
      out.terms[bool_var(ep)] = 1;
      return out;
    }
    throw Unsupported({"expression '" + to_string(ep) + "'"});
  }

  int materialize(const Lin& lin) {
    if (lin.terms.empty()) return constant(lin.c);
    if (lin.terms.size() == 1 && lin.c == 0 && lin.terms.begin()->second == 1) return lin.terms.begin()->first;
    i128 mn = lin.c, mx = lin.c;
    std::vector<Term> terms;
    for (const auto& [v, a] : lin.terms) {
      i128 p = static_cast<i128>(a) * s_.lo(v), q = static_cast<i128>(a) * s_.hi(v);
      mn += std::min(p, q);
      mx += std::max(p, q);
      terms.push_back({a, v});
    }
    int z = s_.new_var(IntDom::range(clamp64(mn), clamp64(mx)));
    terms.push_back({-1, z});
    s_.add(std::make_unique<LinearReif>(std::move(terms), lin.c, LinearReif::Rel::Eq, one(), false));
    return z;
  }

  int int_var(const ExprPtr& e) { return materialize(linear(e)); }

  /// Posts b <-> (lhs op rhs).
  void comparison(const Expr& e, int b) {
    Lin l = linear(e.args[0]), r = linear(e.args[1]);
    Lin d;  // l - r
    d.add(l, 1);
    d.add(r, -1);
    LinearReif::Rel rel = LinearReif::Rel::Le;
    bool negated = false;
    Lin expr = d;
    switch (e.op) {
      case Op::Lt: expr.c += 1; break;  // l - r + 1 <= 0
      case Op::Le: break;
      case Op::Gt: expr = Lin{}; expr.add(d, -1); expr.c += 1; break;
      case Op::Ge: expr = Lin{}; expr.add(d, -1); break;
      case Op::Eq: rel = LinearReif::Rel::Eq; break;
      case Op::Ne: rel = LinearReif::Rel::Eq; negated = true; break;
      default: break;
    }
    std::vector<Term> terms;
    for (const auto& [v, a] : expr.terms) terms.push_back({a, v});
    s_.add(std::make_unique<LinearReif>(std::move(terms), expr.c, rel, b, negated));
  }

  int bool_var(const ExprPtr& ep) {
    const Expr& e = *ep;
    if (e.kind == ExprKind::BoolLit) return constant(e.bool_value ? 1 : 0);
    if (e.kind == ExprKind::Name || e.kind == ExprKind::Index || e.kind == ExprKind::IntLit) {
      int x = int_var(ep);
      if (!s_.set_min(x, 0) || !s_.set_max(x, 1)) s_.root_failed = true;
      return x;
    }
    if (e.kind == ExprKind::Unary && e.op == Op::Not) {
      int x = bool_var(e.args[0]);
      int b = fresh_bool();
      s_.add(std::make_unique<BoolFn>(b, x, -1, 0b0001));  // f(0)=1, f(1)=0; bit index x*2
      return b;
    }
    if (e.kind == ExprKind::Binary && is_comparison(e.op)) {
      int b = fresh_bool();
      comparison(e, b);
      return b;
    }
    if (e.kind == ExprKind::Binary && e.op == Op::In) {
      int x = int_var(e.args[0]);
      IntSet values;
      for (const auto& a : e.args[1]->args) values.push_back(a->int_value);
      std::sort(values.begin(), values.end());
      values.erase(std::unique(values.begin(), values.end()), values.end());
      int b = fresh_bool();
      s_.add(std::make_unique<InSet>(b, x, std::move(values)));
      return b;
    }
    if (e.kind == ExprKind::Binary && is_logical(e.op)) {
      int x = bool_var(e.args[0]);
      int y = bool_var(e.args[1]);
      // truth tables indexed by x*2 + y: (0,0) (0,1) (1,0) (1,1)
      unsigned table = 0;
      switch (e.op) {
        case Op::And: table = 0b1000; break;
        case Op::Or: table = 0b1110; break;
        case Op::Xor: table = 0b0110; break;
        case Op::Implies: table = 0b1011; break;
        case Op::RevImplies: table = 0b1101; break;
        case Op::Iff: table = 0b1001; break;
        default: break;
      }
      int b = fresh_bool();
      s_.add(std::make_unique<BoolFn>(b, x, y, table));
      return b;
    }
    if (e.kind == ExprKind::Binary || e.kind == ExprKind::Unary) {
      int x = int_var(ep);
      if (!s_.set_min(x, 0) || !s_.set_max(x, 1)) s_.root_failed = true;
      return x;
    }
    throw Unsupported({"expression '" + to_string(ep) + "'"});
  }

  Space& s_;
  const FlatModel& fm_;
  std::map<std::int64_t, int> constants_;
  std::map<std::string, std::vector<int>> tables_;
};

}  // namespace

// --- SolverSpace ----------------------------------------------------------------------

SolverSpace::SolverSpace(const FlatModel& fm) {
  std::vector<std::string> bad;
  scan_unsupported(fm, bad);
  if (!bad.empty()) throw Unsupported(std::move(bad));
  auto sp = std::make_unique<Space>();
  sp->model = fm;
  Compiler c(*sp, sp->model);
  c.declare();
  for (const auto& con : sp->model.constraints) c.post_true(con.expr);
  sp->groups = sp->model.constraints.size();
  if (sp->model.objective) {
    sp->objective_var = c.objective(sp->model.objective->expr);
    sp->minimize = sp->model.objective->kind == ObjectiveKind::Minimize;
    ++sp->groups;
  }
  sp->decision = std::move(c.decision);
  sp->arrays = std::move(c.arrays);
  s_ = std::move(sp);
}

SolverSpace::~SolverSpace() = default;
SolverSpace::SolverSpace(SolverSpace&&) noexcept = default;
SolverSpace& SolverSpace::operator=(SolverSpace&&) noexcept = default;

Space& SolverSpace::impl() { return *s_; }
const FlatModel& SolverSpace::model() const { return s_->model; }
std::size_t SolverSpace::variable_count() const { return s_->decision.size(); }
std::size_t SolverSpace::total_variable_count() const { return s_->doms.size(); }
std::size_t SolverSpace::propagator_groups() const { return s_->groups; }
std::size_t SolverSpace::propagator_count() const { return s_->props.size(); }

std::vector<std::int64_t> SolverSpace::domain_of(const std::string& name, std::size_t element) const {
  const auto& ids = s_->arrays.at(name);
  std::vector<std::int64_t> out;
  s_->dom(ids.at(element)).for_each([&](std::int64_t v) { out.push_back(v); });
  return out;
}

bool SolverSpace::propagate_root() { return s_->propagate(); }

// --- Search -------------------------------------------------------------------------------

struct Search::State {
  SolverSpace* holder;
  Space* space;
  SearchConfig cfg;
  SolveStats stats;
  std::chrono::steady_clock::time_point start;

  struct Frame {
    int var;
    std::int64_t value;
    bool right;
  };
  std::vector<Frame> frames;
  bool started = false;
  bool done = false;
  bool truncated = false;
  bool pending_backtrack = false;
  int base_level = 0;

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  bool out_of_time() {
    if (!cfg.time_limit) return false;
    if ((stats.nodes & 63) != 0) return false;
    return elapsed() > *cfg.time_limit;
  }

  int select() const {
    const Space& s = *space;
    const auto& decision = space->decision;
    int best = -1;
    std::uint64_t best_size = 0;
    for (int x : decision) {
      if (s.fixed(x)) continue;
      if (cfg.var_order == SearchConfig::VarOrder::InputOrder) return x;
      auto size = s.dom(x).size();
      if (best < 0 || size < best_size) {
        best = x;
        best_size = size;
      }
    }
    if (best >= 0) return best;
    for (std::size_t x = 0; x < s.doms.size(); ++x)
      if (!s.doms[x].fixed()) return static_cast<int>(x);
    return -1;
  }

  /// Undoes decisions until an untried alternative succeeds. False when the
  /// tree is exhausted.
  bool backtrack() {
    while (!frames.empty()) {
      Frame& f = frames.back();
      space->pop_level();
      if (f.right) {
        frames.pop_back();
        continue;
      }
      f.right = true;
      space->push_level();
      ++stats.nodes;
      if (space->remove(f.var, f.value) && space->propagate()) return true;
      ++stats.failures;
    }
    return false;
  }

  Solution extract() const {
    Solution sol;
    const auto& m = space->model;
    for (const auto& v : m.variables) {
      auto& cells = sol.values[v.name];
      for (int id : space->arrays.at(v.name)) {
        auto x = space->lo(id);
        if (v.base == FlatBase::Bool)
          cells.emplace_back(x != 0);
        else
          cells.emplace_back(x);
      }
    }
    return sol;
  }

  void verify(Solution& sol) const {
    const auto& m = space->model;
    auto check = check_solution(m, sol);
    if (!check.satisfied) {
      const auto& v = check.violations.front();
      throw Error("internal solver error: solution violates '" + v.text + "'" +
                  (v.reason.empty() ? "" : " (" + v.reason + ")"));
    }
    if (m.objective) {
      auto value = Evaluator(m).eval(m.objective->expr, sol).as_int();
      if (space->objective_var >= 0 && value != space->lo(space->objective_var))
        throw Error("internal solver error: objective value mismatch");
      sol.objective_value = value;
    }
  }

  std::optional<Solution> next() {
    if (done) return std::nullopt;
    if (!started) {
      started = true;
      start = std::chrono::steady_clock::now();
      space->push_level();
      base_level = space->level;
      ++stats.nodes;
      if (!space->propagate()) {
        ++stats.failures;
        finish();
        return std::nullopt;
      }
    } else if (pending_backtrack) {
      pending_backtrack = false;
      if (!backtrack()) {
        finish();
        return std::nullopt;
      }
    }
    if (cfg.solution_limit && stats.solutions >= *cfg.solution_limit) {
      truncated = true;
      finish();
      return std::nullopt;
    }
    for (;;) {
      if (out_of_time()) {
        truncated = true;
        finish();
        return std::nullopt;
      }
      int x = select();
      if (x < 0) {
        Solution sol = extract();
        verify(sol);
        ++stats.solutions;
        if (space->objective_var >= 0 && space->optimizing) space->bound = space->lo(space->objective_var);
        pending_backtrack = true;
        stats.seconds = elapsed();
        stats.propagations = space->propagations - base_propagations;
        return sol;
      }
      std::int64_t v = cfg.value_order == SearchConfig::ValueOrder::Min ? space->lo(x) : space->hi(x);
      frames.push_back({x, v, false});
      space->push_level();
      ++stats.nodes;
      if (space->assign(x, v) && space->propagate()) continue;
      ++stats.failures;
      if (!backtrack()) {
        finish();
        return std::nullopt;
      }
    }
  }

  void finish() {
    done = true;
    while (space->level >= base_level && space->level > 0) space->pop_level();
    frames.clear();
    stats.seconds = started ? elapsed() : 0.0;
    stats.propagations = space->propagations - base_propagations;
  }

  std::uint64_t base_propagations = 0;
};

Search::Search(SolverSpace& space, SearchConfig cfg) : st_(std::make_unique<State>()) {
  if (cfg.solution_limit && *cfg.solution_limit < 1) throw ContractError("solution limit must be at least 1");
  if (cfg.time_limit && *cfg.time_limit <= 0) throw ContractError("time limit must be positive");
  st_->holder = &space;
  st_->space = &space.impl();
  st_->cfg = cfg;
  st_->base_propagations = st_->space->propagations;
}

Search::~Search() {
  if (st_ && st_->started && !st_->done) st_->finish();
}

std::optional<Solution> Search::next() { return st_->next(); }
bool Search::truncated() const { return st_->truncated; }
bool Search::exhausted() const { return st_->done && !st_->truncated; }
const SolveStats& Search::stats() const { return st_->stats; }

OptimizeResult optimize(SolverSpace& space, const SearchConfig& cfg) {
  if (!space.model().objective) throw ContractError("model has no objective");
  Space& s = space.impl();
  s.bound.reset();
  s.optimizing = true;
  OptimizeResult r;
  {
    SearchConfig c = cfg;
    c.solution_limit.reset();
    Search search(space, c);
    while (auto sol = search.next()) {
      r.best = std::move(sol);
      if (cfg.solution_limit && search.stats().solutions >= *cfg.solution_limit) break;
    }
    r.stats = search.stats();
    bool hit_limit = search.truncated() || (cfg.solution_limit && r.stats.solutions >= *cfg.solution_limit && !search.exhausted());
    if (hit_limit)
      r.status = OptimizeResult::Status::Truncated;
    else
      r.status = r.best ? OptimizeResult::Status::Optimal : OptimizeResult::Status::Infeasible;
  }
  s.bound.reset();
  s.optimizing = false;
  return r;
}

std::vector<Solution> solve_all(const FlatModel& fm, const SearchConfig& cfg, SolveStats* stats, bool* truncated) {
  SolverSpace space(fm);
  Search search(space, cfg);
  std::vector<Solution> out;
  while (auto s = search.next()) out.push_back(std::move(*s));
  if (stats) *stats = search.stats();
  if (truncated) *truncated = search.truncated();
  return out;
}

}  // namespace scomma
