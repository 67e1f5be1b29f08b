#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"
#include "types.hpp"

namespace scatter1d {

struct DeltaTerm {
    cplx strength;
    double location;
    friend bool operator==(const DeltaTerm&, const DeltaTerm&) = default;
};

struct DeltaComb {
    std::vector<DeltaTerm> terms;  // strictly increasing locations, nonzero strengths
};

struct PiecewiseConstant {
    std::vector<double> breakpoints;  // x_0 < ... < x_m
    std::vector<cplx> values;         // one per cell, m entries
};

// strength * exp(2 pi i harmonic (x - offset) / length) on [offset, offset + length]
struct ExpGrating {
    cplx strength;
    int harmonic = 1;
    double length = 1.0;
    double offset = 0.0;
};

// sum_n c_n exp(2 pi i n x / length) on [0, length]
struct FourierCell {
    double length = 1.0;
    std::vector<std::pair<int, cplx>> coefficients;
};

// Unidirectionally invisible profile generated by S(z) = z [shape (z-1)^2 + 1]
// on [shift, shift + pi winding / design_k]. With conjugated set, the profile is
// the complex conjugate (the time-reversed, left-invisible block).
struct SmisProfile {
    double design_k = 1.0;
    double shape = 0.0;
    int winding = 1;
    double shift = 0.0;
    bool conjugated = false;
};

// Uniform grid with linear interpolation; zero outside [x0, x0 + (N-1) dx].
struct Sampled {
    double x0 = 0.0;
    double dx = 1.0;
    std::vector<cplx> values;

    double end() const { return x0 + dx * double(values.size() - 1); }

    template <class F>
    static Sampled from_function(const F& f, double lo, double hi, int cells = 2048) {
        Sampled s;
        s.x0 = lo;
        s.dx = (hi - lo) / cells;
        s.values.resize(cells + 1);
        for (int i = 0; i <= cells; ++i) s.values[i] = f(lo + s.dx * i);
        return s;
    }
};

namespace detail {
struct Node;
}

class Potential;

struct Sum {
    std::vector<Potential> terms;
};
struct Translated;
struct TimeReversed;
struct LocallyPeriodic;

class Potential {
public:
    Potential();  // the zero potential
    Potential(DeltaComb v);
    Potential(PiecewiseConstant v);
    Potential(ExpGrating v);
    Potential(FourierCell v);
    Potential(SmisProfile v);
    Potential(Sampled v);
    Potential(Sum v);
    Potential(Translated v);
    Potential(TimeReversed v);
    Potential(LocallyPeriodic v);

    const detail::Node& node() const { return *node_; }

    template <class T>
    const T* as() const;

    bool is_zero() const;

private:
    std::shared_ptr<const detail::Node> node_;
};

struct Translated {
    Potential inner;
    double shift = 0.0;
};

struct TimeReversed {
    Potential inner;
};

// copies of cell placed at cell + j * period, j = 0..copies-1
struct LocallyPeriodic {
    Potential cell;
    int copies = 1;
    double period = 1.0;
};

namespace detail {
struct Node : std::variant<DeltaComb, PiecewiseConstant, ExpGrating, FourierCell, SmisProfile,
                           Sampled, Sum, Translated, TimeReversed, LocallyPeriodic> {
    using variant::variant;
};

template <class... Fs>
struct overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;
}  // namespace detail

template <class T>
const T* Potential::as() const {
    return std::get_if<T>(static_cast<const typename detail::Node::variant*>(node_.get()));
}

template <class F>
decltype(auto) visit(const Potential& p, F&& f) {
    return std::visit(std::forward<F>(f),
                      static_cast<const detail::Node::variant&>(p.node()));
}

// ---- construction and validation ----

namespace detail {
inline void require(bool ok, const std::string& what) {
    if (!ok) throw invalid_input(what);
}
inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }
}  // namespace detail

inline std::optional<Interval> support(const Potential& p);

inline Potential::Potential() : node_(std::make_shared<detail::Node>(Sum{})) {}

inline Potential::Potential(DeltaComb v) {
    for (std::size_t i = 0; i < v.terms.size(); ++i) {
        detail::require(detail::finite(v.terms[i].strength) && std::isfinite(v.terms[i].location),
                        "delta comb: non-finite term");
        detail::require(v.terms[i].strength != cplx{0.0}, "delta comb: zero strength");
        if (i > 0)
            detail::require(v.terms[i].location > v.terms[i - 1].location,
                            "delta comb: locations must be strictly increasing");
    }
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(PiecewiseConstant v) {
    detail::require(v.breakpoints.size() >= 2 && v.values.size() + 1 == v.breakpoints.size(),
                    "piecewise: need m >= 1 cells and m+1 breakpoints");
    for (std::size_t i = 1; i < v.breakpoints.size(); ++i)
        detail::require(v.breakpoints[i] > v.breakpoints[i - 1],
                        "piecewise: breakpoints must be strictly increasing");
    for (auto z : v.values) detail::require(detail::finite(z), "piecewise: non-finite value");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(ExpGrating v) {
    detail::require(v.length > 0.0 && v.harmonic >= 1, "exp grating: need length > 0, harmonic >= 1");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(FourierCell v) {
    detail::require(v.length > 0.0, "fourier cell: need length > 0");
    for (auto& [n, c] : v.coefficients)
        detail::require(c != cplx{0.0} && detail::finite(c), "fourier cell: coefficients must be nonzero");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(SmisProfile v) {
    detail::require(v.design_k > 0.0, "smis: design wavenumber must be positive");
    detail::require(v.shape > -0.25, "smis: shape parameter must exceed -1/4");
    detail::require(v.winding >= 1, "smis: winding must be positive");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(Sampled v) {
    detail::require(v.dx > 0.0 && v.values.size() >= 2, "sampled: need dx > 0 and two samples");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(Sum v) : node_(std::make_shared<detail::Node>(std::move(v))) {}

inline Potential::Potential(Translated v) {
    detail::require(std::isfinite(v.shift), "translated: non-finite shift");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline Potential::Potential(TimeReversed v) : node_(std::make_shared<detail::Node>(std::move(v))) {}

inline Potential::Potential(LocallyPeriodic v) {
    detail::require(v.copies >= 1, "locally periodic: copies must be positive");
    detail::require(v.period > 0.0, "locally periodic: period must be positive");
    if (auto s = support(v.cell))
        detail::require(v.period >= s->length() * (1.0 - 1e-12),
                        "locally periodic: period shorter than the cell support");
    node_ = std::make_shared<detail::Node>(std::move(v));
}

inline bool Potential::is_zero() const {
    const auto* s = as<Sum>();
    if (!s) return false;
    return std::all_of(s->terms.begin(), s->terms.end(), [](const Potential& t) { return t.is_zero(); });
}

inline Potential translated(Potential p, double shift) { return Translated{std::move(p), shift}; }
inline Potential time_reversed(Potential p) { return TimeReversed{std::move(p)}; }
inline Potential sum_of(std::vector<Potential> terms) { return Sum{std::move(terms)}; }

inline Potential delta(cplx strength, double location) {
    return DeltaComb{{DeltaTerm{strength, location}}};
}

inline Potential barrier(cplx height, double lo, double hi) {
    return PiecewiseConstant{{lo, hi}, {height}};
}

// ---- pointwise evaluation ----

inline double smis_length(const SmisProfile& s) { return pi * s.winding / s.design_k; }

// v(y) = -4 k0^2 z^2 S''(z) / S(z) with z = exp(-2 i k0 y), y measured from the block start.
inline cplx smis_value(double design_k, double shape, double y) {
    const cplx z = std::exp(cplx{0.0, -2.0 * design_k * y});
    const cplx s = z * (shape * (z - 1.0) * (z - 1.0) + 1.0);
    const cplx s2 = shape * (6.0 * z - 4.0);
    return -4.0 * design_k * design_k * z * z * s2 / s;
}

// Smooth part of v at x; delta terms are reported by delta_terms().
inline cplx evaluate(const Potential& p, double x) {
    using namespace detail;
    return visit(p, overloaded{
        [](const DeltaComb&) { return cplx{0.0}; },
        [x](const PiecewiseConstant& v) {
            const auto& b = v.breakpoints;
            if (x < b.front() || x > b.back()) return cplx{0.0};
            auto it = std::upper_bound(b.begin(), b.end(), x);
            std::size_t cell = std::min<std::size_t>(std::size_t(it - b.begin()) - 1, v.values.size() - 1);
            return v.values[cell];
        },
        [x](const ExpGrating& v) {
            const double y = x - v.offset;
            if (y < 0.0 || y > v.length) return cplx{0.0};
            return v.strength * std::exp(cplx{0.0, 2.0 * pi * v.harmonic * y / v.length});
        },
        [x](const FourierCell& v) {
            if (x < 0.0 || x > v.length) return cplx{0.0};
            cplx s = 0.0;
            for (auto& [n, c] : v.coefficients) s += c * std::exp(cplx{0.0, 2.0 * pi * n * x / v.length});
            return s;
        },
        [x](const SmisProfile& v) {
            const double y = x - v.shift;
            if (y < 0.0 || y > smis_length(v)) return cplx{0.0};
            const cplx val = smis_value(v.design_k, v.shape, y);
            return v.conjugated ? std::conj(val) : val;
        },
        [x](const Sampled& v) {
            if (x < v.x0 || x > v.end()) return cplx{0.0};
            const double t = (x - v.x0) / v.dx;
            std::size_t i = std::min<std::size_t>(std::size_t(t), v.values.size() - 2);
            const double f = t - double(i);
            return v.values[i] * (1.0 - f) + v.values[i + 1] * f;
        },
        [x](const Sum& v) {
            cplx s = 0.0;
            for (const auto& t : v.terms) s += evaluate(t, x);
            return s;
        },
        [x](const Translated& v) { return evaluate(v.inner, x - v.shift); },
        [x](const TimeReversed& v) { return std::conj(evaluate(v.inner, x)); },
        [x](const LocallyPeriodic& v) {
            auto s = support(v.cell);
            if (!s) return cplx{0.0};
            const int jlo = std::max(0, int(std::floor((x - s->hi) / v.period)));
            const int jhi = std::min(v.copies - 1, int(std::ceil((x - s->lo) / v.period)));
            cplx sum = 0.0;
            for (int j = jlo; j <= jhi; ++j) sum += evaluate(v.cell, x - j * v.period);
            return sum;
        },
    });
}

// ---- support and structure ----

inline std::optional<Interval> hull(std::optional<Interval> a, std::optional<Interval> b) {
    if (!a) return b;
    if (!b) return a;
    return Interval{std::min(a->lo, b->lo), std::max(a->hi, b->hi)};
}

// Nominal support; nullopt for the identically zero potential.
inline std::optional<Interval> support(const Potential& p) {
    using namespace detail;
    using R = std::optional<Interval>;
    return visit(p, overloaded{
        [](const DeltaComb& v) -> R {
            if (v.terms.empty()) return std::nullopt;
            return Interval{v.terms.front().location, v.terms.back().location};
        },
        [](const PiecewiseConstant& v) -> R { return Interval{v.breakpoints.front(), v.breakpoints.back()}; },
        [](const ExpGrating& v) -> R { return Interval{v.offset, v.offset + v.length}; },
        [](const FourierCell& v) -> R {
            if (v.coefficients.empty()) return std::nullopt;
            return Interval{0.0, v.length};
        },
        [](const SmisProfile& v) -> R { return Interval{v.shift, v.shift + smis_length(v)}; },
        [](const Sampled& v) -> R { return Interval{v.x0, v.end()}; },
        [](const Sum& v) -> R {
            R h;
            for (const auto& t : v.terms) h = hull(h, support(t));
            return h;
        },
        [](const Translated& v) -> R {
            auto s = support(v.inner);
            if (!s) return s;
            return Interval{s->lo + v.shift, s->hi + v.shift};
        },
        [](const TimeReversed& v) -> R { return support(v.inner); },
        [](const LocallyPeriodic& v) -> R {
            auto s = support(v.cell);
            if (!s) return s;
            return Interval{s->lo, s->hi + (v.copies - 1) * v.period};
        },
    });
}

// Delta terms sorted by location. Coincident locations (possible in Sum) are kept separate.
inline std::vector<DeltaTerm> delta_terms(const Potential& p) {
    using namespace detail;
    using R = std::vector<DeltaTerm>;
    R out = visit(p, overloaded{
        [](const DeltaComb& v) -> R { return v.terms; },
        [](const Sum& v) -> R {
            R all;
            for (const auto& t : v.terms) {
                auto d = delta_terms(t);
                all.insert(all.end(), d.begin(), d.end());
            }
            return all;
        },
        [](const Translated& v) -> R {
            auto d = delta_terms(v.inner);
            for (auto& t : d) t.location += v.shift;
            return d;
        },
        [](const TimeReversed& v) -> R {
            auto d = delta_terms(v.inner);
            for (auto& t : d) t.strength = std::conj(t.strength);
            return d;
        },
        [](const LocallyPeriodic& v) -> R {
            auto d = delta_terms(v.cell);
            R all;
            for (int j = 0; j < v.copies; ++j)
                for (auto t : d) {
                    t.location += j * v.period;
                    all.push_back(t);
                }
            return all;
        },
        [](const auto&) -> R { return {}; },
    });
    std::stable_sort(out.begin(), out.end(),
                     [](const DeltaTerm& a, const DeltaTerm& b) { return a.location < b.location; });
    return out;
}

// Intervals (merged, sorted) outside which the smooth part vanishes.
inline std::vector<Interval> smooth_intervals(const Potential& p) {
    using namespace detail;
    using R = std::vector<Interval>;
    R raw = visit(p, overloaded{
        [](const DeltaComb&) -> R { return {}; },
        [](const Sum& v) -> R {
            R all;
            for (const auto& t : v.terms) {
                auto s = smooth_intervals(t);
                all.insert(all.end(), s.begin(), s.end());
            }
            return all;
        },
        [](const Translated& v) -> R {
            auto s = smooth_intervals(v.inner);
            for (auto& i : s) i = {i.lo + v.shift, i.hi + v.shift};
            return s;
        },
        [](const TimeReversed& v) -> R { return smooth_intervals(v.inner); },
        [](const LocallyPeriodic& v) -> R {
            auto s = smooth_intervals(v.cell);
            R all;
            for (int j = 0; j < v.copies; ++j)
                for (auto i : s) all.push_back({i.lo + j * v.period, i.hi + j * v.period});
            return all;
        },
        [&p](const auto&) -> R {
            auto s = support(p);
            return s ? R{*s} : R{};
        },
    });
    std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    R merged;
    for (const auto& i : raw) {
        if (i.length() <= 0.0) continue;
        if (!merged.empty() && i.lo <= merged.back().hi)
            merged.back().hi = std::max(merged.back().hi, i.hi);
        else
            merged.push_back(i);
    }
    return merged;
}

// Points where the smooth part may fail to be smooth, plus delta locations. Sorted, unique.
inline std::vector<double> breakpoints(const Potential& p) {
    using namespace detail;
    using R = std::vector<double>;
    R out = visit(p, overloaded{
        [](const DeltaComb& v) -> R {
            R r;
            for (auto& t : v.terms) r.push_back(t.location);
            return r;
        },
        [](const PiecewiseConstant& v) -> R { return v.breakpoints; },
        [](const Sampled& v) -> R {
            R r(v.values.size());
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = v.x0 + v.dx * double(i);
            return r;
        },
        [](const Sum& v) -> R {
            R all;
            for (const auto& t : v.terms) {
                auto b = breakpoints(t);
                all.insert(all.end(), b.begin(), b.end());
            }
            return all;
        },
        [](const Translated& v) -> R {
            auto b = breakpoints(v.inner);
            for (auto& x : b) x += v.shift;
            return b;
        },
        [](const TimeReversed& v) -> R { return breakpoints(v.inner); },
        [](const LocallyPeriodic& v) -> R {
            auto b = breakpoints(v.cell);
            R all;
            for (int j = 0; j < v.copies; ++j)
                for (double x : b) all.push_back(x + j * v.period);
            return all;
        },
        [&p](const auto&) -> R {
            auto s = support(p);
            return s ? R{s->lo, s->hi} : R{};
        },
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Segments between consecutive breakpoints that lie inside the smooth support.
inline std::vector<Interval> smooth_segments(const Potential& p) {
    const auto pieces = smooth_intervals(p);
    const auto bps = breakpoints(p);
    std::vector<Interval> segs;
    for (const auto& piece : pieces) {
        double lo = piece.lo;
        for (auto it = std::upper_bound(bps.begin(), bps.end(), piece.lo);
             it != bps.end() && *it < piece.hi; ++it) {
            segs.push_back({lo, *it});
            lo = *it;
        }
        segs.push_back({lo, piece.hi});
    }
    return segs;
}

// True when the non-empty supports of the Sum terms overlap (touching is allowed).
inline bool has_overlapping_terms(const Sum& s) {
    std::vector<Interval> sup;
    for (const auto& t : s.terms)
        if (auto i = support(t)) sup.push_back(*i);
    std::sort(sup.begin(), sup.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    for (std::size_t i = 1; i < sup.size(); ++i)
        if (sup[i].lo < sup[i - 1].hi) return true;
    return false;
}

// Structural check that the potential is real-valued.
inline bool is_real(const Potential& p) {
    using namespace detail;
    auto real = [](cplx z) { return z.imag() == 0.0; };
    return visit(p, overloaded{
        [&](const DeltaComb& v) {
            return std::all_of(v.terms.begin(), v.terms.end(), [&](auto& t) { return real(t.strength); });
        },
        [&](const PiecewiseConstant& v) { return std::all_of(v.values.begin(), v.values.end(), real); },
        [](const ExpGrating& v) { return v.strength == cplx{0.0}; },
        [](const FourierCell& v) {
            for (auto& [n, c] : v.coefficients) {
                auto it = std::find_if(v.coefficients.begin(), v.coefficients.end(),
                                       [m = -n](auto& e) { return e.first == m; });
                if (it == v.coefficients.end() || it->second != std::conj(c)) return false;
            }
            return true;
        },
        [](const SmisProfile& v) { return v.shape == 0.0; },
        [&](const Sampled& v) { return std::all_of(v.values.begin(), v.values.end(), real); },
        [](const Sum& v) {
            return std::all_of(v.terms.begin(), v.terms.end(), [](auto& t) { return is_real(t); });
        },
        [](const Translated& v) { return is_real(v.inner); },
        [](const TimeReversed& v) { return is_real(v.inner); },
        [](const LocallyPeriodic& v) { return is_real(v.cell); },
    });
}

// Potentials whose transfer matrix has a closed form: delta combs, piecewise-constant
// stacks, and combinators of these with disjoint supports.
inline bool is_closed_form(const Potential& p) {
    using namespace detail;
    return visit(p, overloaded{
        [](const DeltaComb&) { return true; },
        [](const PiecewiseConstant&) { return true; },
        [](const Sum& v) {
            return !has_overlapping_terms(v) &&
                   std::all_of(v.terms.begin(), v.terms.end(), [](auto& t) { return is_closed_form(t); });
        },
        [](const Translated& v) { return is_closed_form(v.inner); },
        [](const TimeReversed& v) { return is_closed_form(v.inner); },
        [](const LocallyPeriodic& v) { return is_closed_form(v.cell); },
        [](const auto&) { return false; },
    });
}

// ---- Fourier transforms ----

// int e^{-i kappa x} v(x) dx, including delta terms.
inline cplx fourier_transform(const Potential& p, double kappa,
                              const numerics::QuadratureOptions& opt = {}) {
    using namespace detail;
    using numerics::grating_E;
    return visit(p, overloaded{
        [&](const DeltaComb& v) {
            cplx s = 0.0;
            for (auto& t : v.terms) s += t.strength * std::exp(cplx{0.0, -kappa * t.location});
            return s;
        },
        [&](const PiecewiseConstant& v) {
            cplx s = 0.0;
            for (std::size_t j = 0; j < v.values.size(); ++j)
                s += v.values[j] * numerics::window_transform(kappa, v.breakpoints[j], v.breakpoints[j + 1]);
            return s;
        },
        [&](const ExpGrating& v) {
            const double K = 2.0 * pi / v.length;
            return std::exp(cplx{0.0, -kappa * v.offset}) * I_unit * v.strength *
                   grating_E(kappa - v.harmonic * K, v.length);
        },
        [&](const FourierCell& v) {
            const double K = 2.0 * pi / v.length;
            cplx s = 0.0;
            for (auto& [n, c] : v.coefficients) s += I_unit * c * grating_E(kappa - n * K, v.length);
            return s;
        },
        [&](const SmisProfile&) {
            return numerics::oscillatory_integral([&](double x) { return evaluate(p, x); }, kappa,
                                                  {*support(p)}, opt);
        },
        [&](const Sampled& v) {
            cplx s = 0.0;
            for (std::size_t i = 0; i + 1 < v.values.size(); ++i) {
                const double a = v.x0 + v.dx * double(i);
                s += numerics::linear_filon(kappa, a, a + v.dx, v.values[i], v.values[i + 1]);
            }
            return s;
        },
        [&](const Sum& v) {
            cplx s = 0.0;
            for (const auto& t : v.terms) s += fourier_transform(t, kappa, opt);
            return s;
        },
        [&](const Translated& v) {
            return std::exp(cplx{0.0, -kappa * v.shift}) * fourier_transform(v.inner, kappa, opt);
        },
        [&](const TimeReversed& v) { return std::conj(fourier_transform(v.inner, -kappa, opt)); },
        [&](const LocallyPeriodic& v) {
            const cplx cell = fourier_transform(v.cell, kappa, opt);
            cplx s = 0.0;
            for (int j = 0; j < v.copies; ++j) s += std::exp(cplx{0.0, -kappa * j * v.period});
            return s * cell;
        },
    });
}

namespace detail {

// A spatially ordered piece for ordered double integrals: "first" is its
// contribution to the inner (x1) integral, "second" to the outer (x2) one,
// and "self" the ordered double integral within the piece.
struct OrderedAtom {
    double position;
    cplx first, second, self;
};

inline cplx combine_ordered(std::vector<OrderedAtom> atoms) {
    std::stable_sort(atoms.begin(), atoms.end(),
                     [](const OrderedAtom& a, const OrderedAtom& b) { return a.position < b.position; });
    cplx prefix = 0.0, total = 0.0;
    for (const auto& a : atoms) {
        total += a.self + prefix * a.second;
        prefix += a.first;
    }
    return total;
}

// Nested Gauss-Legendre for one smooth segment: returns (A1, A2, ordered self term).
template <class F>
std::tuple<cplx, cplx, cplx> segment_double(const F& f, double k1, double k2, Interval seg, int panels) {
    const auto& g = numerics::GaussRule::get();
    const double h = seg.length() / panels;
    cplx a1 = 0.0, a2 = 0.0, self = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double p0 = seg.lo + p * h;
        cplx panel_a1 = 0.0;
        for (int i = 0; i < numerics::GaussRule::order; ++i) {
            const double x2 = p0 + 0.5 * h * (1.0 + g.x[i]);
            const cplx f2 = f(x2);
            // inner integral over [p0, x2]
            const double hi = x2 - p0;
            cplx inner = 0.0;
            for (int j = 0; j < numerics::GaussRule::order; ++j) {
                const double x1 = p0 + 0.5 * hi * (1.0 + g.x[j]);
                inner += g.w[j] * f(x1) * std::exp(cplx{0.0, -k1 * x1});
            }
            inner *= 0.5 * hi;
            const cplx e1 = std::exp(cplx{0.0, -k1 * x2}), e2 = std::exp(cplx{0.0, -k2 * x2});
            const double w = 0.5 * h * g.w[i];
            self += w * e2 * f2 * (a1 + inner);
            panel_a1 += w * e1 * f2;
            a2 += w * e2 * f2;
        }
        a1 += panel_a1;
    }
    return {a1, a2, self};
}

inline cplx generic_double_fourier(const Potential& p, double k1, double k2,
                                   const numerics::QuadratureOptions& opt) {
    std::vector<OrderedAtom> atoms;
    for (const auto& d : delta_terms(p))
        atoms.push_back({d.location, d.strength * std::exp(cplx{0.0, -k1 * d.location}),
                         d.strength * std::exp(cplx{0.0, -k2 * d.location}), 0.0});
    auto f = [&p](double x) { return evaluate(p, x); };
    const double kmax = std::max({std::abs(k1), std::abs(k2), std::abs(k1 + k2)});
    for (const auto& seg : smooth_segments(p)) {
        if (seg.length() <= 0.0) continue;
        int panels = std::max(1, int(std::ceil(kmax * seg.length() / pi)));
        auto prev = segment_double(f, k1, k2, seg, panels);
        for (;;) {
            panels *= 2;
            if (panels > opt.max_panels) throw convergence_error("double Fourier quadrature did not converge");
            auto cur = segment_double(f, k1, k2, seg, panels);
            const double diff = std::max({std::abs(std::get<0>(cur) - std::get<0>(prev)),
                                          std::abs(std::get<1>(cur) - std::get<1>(prev)),
                                          std::abs(std::get<2>(cur) - std::get<2>(prev))});
            const double scale = std::max({std::abs(std::get<0>(cur)), std::abs(std::get<1>(cur)),
                                           std::abs(std::get<2>(cur))});
            prev = cur;
            if (diff <= std::max(opt.abs_tol * seg.length(), opt.rel_tol * scale)) break;
        }
        // Ordering by midpoint keeps deltas on either end of the segment on the right side.
        atoms.push_back({0.5 * (seg.lo + seg.hi), std::get<0>(prev), std::get<1>(prev), std::get<2>(prev)});
    }
    return combine_ordered(std::move(atoms));
}

}  // namespace detail

// int int_{x1 < x2} e^{-i(k1 x1 + k2 x2)} v(x1) v(x2) dx1 dx2
inline cplx double_fourier(const Potential& p, double k1, double k2,
                           const numerics::QuadratureOptions& opt = {}) {
    using namespace detail;
    return visit(p, overloaded{
        [&](const DeltaComb& v) {
            std::vector<OrderedAtom> atoms;
            for (auto& t : v.terms)
                atoms.push_back({t.location, t.strength * std::exp(cplx{0.0, -k1 * t.location}),
                                 t.strength * std::exp(cplx{0.0, -k2 * t.location}), 0.0});
            return combine_ordered(std::move(atoms));
        },
        [&](const PiecewiseConstant& v) {
            std::vector<OrderedAtom> atoms;
            for (std::size_t j = 0; j < v.values.size(); ++j) {
                const double a = v.breakpoints[j], b = v.breakpoints[j + 1];
                const cplx z = v.values[j];
                atoms.push_back({a, z * numerics::window_transform(k1, a, b),
                                 z * numerics::window_transform(k2, a, b),
                                 z * z * numerics::window_double_transform(k1, k2, a, b)});
            }
            return combine_ordered(std::move(atoms));
        },
        [&](const ExpGrating& v) {
            const double K = 2.0 * pi / v.length, shift = v.harmonic * K;
            return std::exp(cplx{0.0, -(k1 + k2) * v.offset}) * v.strength * v.strength *
                   numerics::grating_F(k1 - shift, k2 - shift, v.length);
        },
        [&](const FourierCell& v) {
            const double K = 2.0 * pi / v.length;
            cplx s = 0.0;
            for (auto& [n, cn] : v.coefficients)
                for (auto& [m, cm] : v.coefficients)
                    s += cn * cm * numerics::grating_F(k1 - n * K, k2 - m * K, v.length);
            return s;
        },
        [&](const Sum& v) {
            if (has_overlapping_terms(v)) return generic_double_fourier(p, k1, k2, opt);
            std::vector<OrderedAtom> atoms;
            for (const auto& t : v.terms) {
                auto s = support(t);
                if (!s) continue;
                atoms.push_back({0.5 * (s->lo + s->hi), fourier_transform(t, k1, opt), fourier_transform(t, k2, opt),
                                 double_fourier(t, k1, k2, opt)});
            }
            return combine_ordered(std::move(atoms));
        },
        [&](const Translated& v) {
            return std::exp(cplx{0.0, -(k1 + k2) * v.shift}) * double_fourier(v.inner, k1, k2, opt);
        },
        [&](const TimeReversed& v) { return std::conj(double_fourier(v.inner, -k1, -k2, opt)); },
        [&](const LocallyPeriodic& v) {
            const cplx f1 = fourier_transform(v.cell, k1, opt), f2 = fourier_transform(v.cell, k2, opt);
            const cplx self = double_fourier(v.cell, k1, k2, opt);
            std::vector<OrderedAtom> atoms;
            for (int j = 0; j < v.copies; ++j) {
                const double s = j * v.period;
                atoms.push_back({s, std::exp(cplx{0.0, -k1 * s}) * f1, std::exp(cplx{0.0, -k2 * s}) * f2,
                                 std::exp(cplx{0.0, -(k1 + k2) * s}) * self});
            }
            return combine_ordered(std::move(atoms));
        },
        [&](const auto&) { return generic_double_fourier(p, k1, k2, opt); },
    });
}

// v = k^2 (1 - eps) from a sampled relative permittivity that equals 1 at both ends.
inline Potential from_permittivity(const Sampled& eps, double k, double end_tol = 1e-9) {
    if (std::abs(eps.values.front() - 1.0) > end_tol || std::abs(eps.values.back() - 1.0) > end_tol)
        throw invalid_input("permittivity profile must reach 1 at both ends");
    Sampled v = eps;
    bool all_zero = true;
    for (auto& e : v.values) {
        e = k * k * (1.0 - e);
        all_zero = all_zero && e == cplx{0.0};
    }
    if (all_zero) return Potential{};
    return v;
}

// Scale every strength in the potential by a complex factor.
inline Potential scaled(const Potential& p, cplx factor) {
    using namespace detail;
    return visit(p, overloaded{
        [&](const DeltaComb& v) -> Potential {
            if (factor == cplx{0.0}) return Potential{};
            auto w = v;
            for (auto& t : w.terms) t.strength *= factor;
            return w;
        },
        [&](const PiecewiseConstant& v) -> Potential {
            auto w = v;
            for (auto& z : w.values) z *= factor;
            return w;
        },
        [&](const ExpGrating& v) -> Potential {
            auto w = v;
            w.strength *= factor;
            return w;
        },
        [&](const FourierCell& v) -> Potential {
            if (factor == cplx{0.0}) return Potential{};
            auto w = v;
            for (auto& [n, c] : w.coefficients) c *= factor;
            return w;
        },
        [&](const SmisProfile&) -> Potential {
            throw invalid_input("smis profiles have a fixed amplitude and cannot be rescaled");
        },
        [&](const Sampled& v) -> Potential {
            auto w = v;
            for (auto& z : w.values) z *= factor;
            return w;
        },
        [&](const Sum& v) -> Potential {
            Sum w;
            for (const auto& t : v.terms) w.terms.push_back(scaled(t, factor));
            return w;
        },
        [&](const Translated& v) -> Potential { return Translated{scaled(v.inner, factor), v.shift}; },
        [&](const TimeReversed& v) -> Potential {
            return TimeReversed{scaled(v.inner, std::conj(factor))};
        },
        [&](const LocallyPeriodic& v) -> Potential {
            return LocallyPeriodic{scaled(v.cell, factor), v.copies, v.period};
        },
    });
}

}  // namespace scatter1d
