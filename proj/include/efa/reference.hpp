#ifndef EFA_REFERENCE_HPP
#define EFA_REFERENCE_HPP

#include "efa/coefficient.hpp"
#include "efa/error.hpp"
#include "efa/grid.hpp"
#include "efa/kernel.hpp"
#include "efa/macroscale.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

namespace efa
{
enum class TensorProvenance
{
    harmonic_mean,
    invariant_measure,
    literature_value
};

template < int D >
struct HomogenizedTensor
{
    Matrix< D >      a0{};
    TensorProvenance provenance = TensorProvenance::literature_value;
};

template < int D >
using ScalarCellFunction = std::function< double(const Point< D >&) >;

template < int D >
using MatrixCellFunction = std::function< Matrix< D >(const Point< D >&) >;

template < int D >
Point< D > unit_period()
{
    Point< D > p;
    p.fill(1.0);
    return p;
}

struct HarmonicMeanOptions
{
    int         base_resolution = 16;      ///< points per unit period on the first pass
    double      rtol            = 1e-10;   ///< stop when two successive passes agree to this
    std::size_t max_points      = 1u << 26;
};

struct QuadratureResult
{
    double      value      = 0.0;
    std::size_t resolution = 0;  ///< points per axis on the final pass (along the first axis in 2D)
};

namespace detail
{
template < int D >
double mean_of_inverse(const std::type_identity_t< ScalarCellFunction< D > >& a, const Point< D >& period, const std::array< std::size_t, D >& n, std::pair< double, double >* range = nullptr)
{
    double s = 0.0, lo = INFINITY, hi = -INFINITY;
    auto   add = [&](const Point< D >& y) {
        const double v = a(y);
        if (!(v > 0.0) || !std::isfinite(v))
            throw DomainError("harmonic_mean: coefficient is not positive at a sample point");
        s += 1.0 / v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    if constexpr (D == 1)
    {
        for (std::size_t i = 0; i < n[0]; ++i)
            add({period[0] * static_cast< double >(i) / static_cast< double >(n[0])});
        if (range)
            *range = {lo, hi};
        return s / static_cast< double >(n[0]);
    }
    else
    {
        for (std::size_t i = 0; i < n[0]; ++i)
        {
            const double y0 = period[0] * static_cast< double >(i) / static_cast< double >(n[0]);
            for (std::size_t j = 0; j < n[1]; ++j)
                add({y0, period[1] * static_cast< double >(j) / static_cast< double >(n[1])});
        }
        if (range)
            *range = {lo, hi};
        return s / static_cast< double >(n[0] * n[1]);
    }
}
} // namespace detail

/// a⁰ = (⟨1/a⟩_Y)⁻¹ over the cell [0, period]^D with the periodic rectangle rule, doubling the
/// resolution until two passes agree to opt.rtol.
template < int D >
QuadratureResult harmonic_mean(const std::type_identity_t< ScalarCellFunction< D > >& a, const Point< D >& period = unit_period< D >(), const HarmonicMeanOptions& opt = {})
{
    for (const double p : period)
        require(p > 0.0, "harmonic_mean: period must be positive");
    std::array< std::size_t, D > n;
    for (int i = 0; i < D; ++i)
        n[i] = static_cast< std::size_t >(std::ceil(period[i] * opt.base_resolution));
    std::pair< double, double > range;
    double prev = 1.0 / detail::mean_of_inverse< D >(a, period, n, &range);
    bool   flat = range.first == range.second;
    for (;;)
    {
        std::size_t total = 1;
        for (auto& ni : n)
        {
            ni *= 2;
            total *= ni;
        }
        if (total > opt.max_points)
            throw InternalError("harmonic_mean: refinement did not converge");
        const double cur = 1.0 / detail::mean_of_inverse< D >(a, period, n, &range);
        // A field that is constant on both passes has that constant as its mean, without rounding.
        if (flat && range.first == range.second)
            return {range.first, n[0]};
        flat = false;
        if (std::abs(cur - prev) <= opt.rtol * std::abs(cur))
            return {cur, n[0]};
        prev = cur;
    }
}

/// Harmonic mean of an isotropic periodic field, taken over its fine-scale cell.
template < int D >
QuadratureResult harmonic_mean(const CoefficientField< D >& field, const HarmonicMeanOptions& opt = {})
{
    if (!field.cell_period())
        throw ConfigError("harmonic_mean: coefficient '" + field.name() + "' has no periodic cell");
    const double eps  = field.epsilon();
    auto         cell = [&field, eps](const Point< D >& y) {
        Point< D > x;
        for (int i = 0; i < D; ++i)
            x[i] = eps * y[i];
        const auto A = field(x);
        if constexpr (D == 2)
            if (A(0, 1) != 0.0 || A(0, 0) != A(1, 1))
                throw ConfigError("harmonic_mean: coefficient is not isotropic");
        return A(0, 0);
    };
    return harmonic_mean< D >(cell, *field.cell_period(), opt);
}

/// Media of the form A(y) = s(y)·A₀ with A₀ fixed: s·ρ is constant, so A⁰ = (⟨1/s⟩)⁻¹ A₀
/// (A₀ normalised to A₀₁₁ = 1). Returns nothing if the field has no periodic cell or is not of
/// this form on a sample set.
template < int D >
std::optional< HomogenizedTensor< D > > homogenized_scaled_tensor(const CoefficientField< D >& field, const HarmonicMeanOptions& opt = {})
{
    if (!field.cell_period())
        return std::nullopt;
    const auto&  period = *field.cell_period();
    const double eps    = field.epsilon();
    auto         at     = [&](const Point< D >& y) {
        Point< D > x;
        for (int i = 0; i < D; ++i)
            x[i] = eps * period[i] * y[i];
        return field(x);
    };
    const Matrix< D > ref  = at(Point< D >{});
    const Matrix< D > base = (1.0 / ref(0, 0)) * ref;
    for (std::size_t k = 0; k < 512; ++k)
    {
        const auto A = at(detail::kronecker_point< D >(k));
        for (int i = 0; i < D; ++i)
            for (int j = 0; j < D; ++j)
                if (std::abs(A(i, j) - A(0, 0) * base(i, j)) > 1e-12 * std::abs(A(0, 0)))
                    return std::nullopt;
    }
    auto cell = [&field, eps](const Point< D >& y) {
        Point< D > x;
        for (int i = 0; i < D; ++i)
            x[i] = eps * y[i];
        return field(x)(0, 0);
    };
    const double s0 = harmonic_mean< D >(cell, period, opt).value;
    return HomogenizedTensor< D >{s0 * base, TensorProvenance::harmonic_mean};
}

template < int D >
struct InvariantMeasure
{
    Point< D >            period{};
    int                   N = 0;       ///< nodes per axis
    std::vector< double > rho;         ///< row-major nodal values, mean exactly 1 up to roundoff
    double                residual = 0.0;  ///< discrete L² norm of the adjoint operator applied to ρ

    Point< D > node(std::size_t k) const
    {
        Point< D > y;
        if constexpr (D == 1)
            y[0] = period[0] * static_cast< double >(k) / N;
        else
        {
            y[0] = period[0] * static_cast< double >(k / N) / N;
            y[1] = period[1] * static_cast< double >(k % N) / N;
        }
        return y;
    }
};

namespace detail
{
/// Sparse centered discretization of ρ ↦ −Σ ∂_ij(A_ij ρ) on a periodic N^D grid.
template < int D >
Eigen::SparseMatrix< double > adjoint_operator(const std::vector< Matrix< D > >& A, const Point< D >& period, int N)
{
    const auto M   = static_cast< Eigen::Index >(A.size());
    auto       wrap = [N](int i) { return ((i % N) + N) % N; };
    std::vector< Eigen::Triplet< double > > trip;
    if constexpr (D == 1)
    {
        const double h2 = std::pow(period[0] / N, 2);
        for (int k = 0; k < N; ++k)
        {
            trip.emplace_back(k, wrap(k - 1), -A[wrap(k - 1)](0, 0) / h2);
            trip.emplace_back(k, k, 2.0 * A[k](0, 0) / h2);
            trip.emplace_back(k, wrap(k + 1), -A[wrap(k + 1)](0, 0) / h2);
        }
    }
    else
    {
        const double h0 = period[0] / N, h1 = period[1] / N;
        auto         id = [&](int i, int j) { return static_cast< Eigen::Index >(wrap(i)) * N + wrap(j); };
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j)
            {
                const auto k = id(i, j);
                trip.emplace_back(k, id(i - 1, j), -A[id(i - 1, j)](0, 0) / (h0 * h0));
                trip.emplace_back(k, id(i + 1, j), -A[id(i + 1, j)](0, 0) / (h0 * h0));
                trip.emplace_back(k, k, 2.0 * A[k](0, 0) / (h0 * h0) + 2.0 * A[k](1, 1) / (h1 * h1));
                trip.emplace_back(k, id(i, j - 1), -A[id(i, j - 1)](1, 1) / (h1 * h1));
                trip.emplace_back(k, id(i, j + 1), -A[id(i, j + 1)](1, 1) / (h1 * h1));
                const double cr = 2.0 / (4.0 * h0 * h1);
                trip.emplace_back(k, id(i + 1, j + 1), -cr * A[id(i + 1, j + 1)](0, 1));
                trip.emplace_back(k, id(i + 1, j - 1), cr * A[id(i + 1, j - 1)](0, 1));
                trip.emplace_back(k, id(i - 1, j + 1), cr * A[id(i - 1, j + 1)](0, 1));
                trip.emplace_back(k, id(i - 1, j - 1), -cr * A[id(i - 1, j - 1)](0, 1));
            }
    }
    Eigen::SparseMatrix< double > L(M, M);
    L.setFromTriplets(trip.begin(), trip.end());
    return L;
}
} // namespace detail

/// Solves −Σ ∂_ij(A_ij ρ) = 0 with mean(ρ) = 1 on a periodic N^D grid over [0, period]^D.
/// The one-dimensional nullspace is fixed by a bordered mean-one constraint row.
template < int D >
InvariantMeasure< D > solve_invariant_measure(const std::type_identity_t< MatrixCellFunction< D > >& A, int N, const Point< D >& period = unit_period< D >())
{
    require(N >= 4, "solve_invariant_measure: need at least 4 nodes per axis");
    InvariantMeasure< D > out;
    out.period = period;
    out.N      = N;
    std::size_t M = 1;
    for (int i = 0; i < D; ++i)
        M *= static_cast< std::size_t >(N);

    std::vector< Matrix< D > > Av(M);
    double                     anorm = 0.0;
    for (std::size_t k = 0; k < M; ++k)
    {
        Av[k] = A(out.node(k));
        require(is_symmetric(Av[k]), "solve_invariant_measure: A must be symmetric");
        anorm = std::max(anorm, spectral_norm(Av[k]));
    }
    const auto L  = detail::adjoint_operator< D >(Av, period, N);
    const auto Mi = static_cast< Eigen::Index >(M);

    std::vector< Eigen::Triplet< double > > trip;
    trip.reserve(static_cast< std::size_t >(L.nonZeros()) + 2 * M);
    for (int c = 0; c < L.outerSize(); ++c)
        for (Eigen::SparseMatrix< double >::InnerIterator it(L, c); it; ++it)
            trip.emplace_back(it.row(), it.col(), it.value());
    // Scale the border like the operator so the bordered matrix stays balanced.
    const double scale = anorm * N * N;
    for (Eigen::Index k = 0; k < Mi; ++k)
    {
        trip.emplace_back(Mi, k, scale / static_cast< double >(M));
        trip.emplace_back(k, Mi, scale / static_cast< double >(M));
    }
    Eigen::SparseMatrix< double > B(Mi + 1, Mi + 1);
    B.setFromTriplets(trip.begin(), trip.end());

    Eigen::SparseLU< Eigen::SparseMatrix< double > > lu;
    lu.compute(B);
    if (lu.info() != Eigen::Success)
        throw DegeneracyError("invariant measure: the adjoint cell operator has a degenerate kernel");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(Mi + 1);
    rhs[Mi]             = scale;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !x.allFinite() || (B * x - rhs).norm() > 1e-8 * scale)
        throw DegeneracyError("invariant measure: bordered system is numerically singular");

    // A nonzero multiplier means the constant vector is not orthogonal to the range, i.e. the
    // kernel of the adjoint is not spanned by a single mean-one density.
    const double mult = std::abs(x[Mi]) / scale;
    if (mult > 1e-8)
        throw DegeneracyError("invariant measure: constraint multiplier is not zero");

    out.rho.assign(x.data(), x.data() + Mi);
    double mean = 0.0;
    for (const double r : out.rho)
        mean += r;
    mean /= static_cast< double >(M);
    for (auto& r : out.rho)
        r /= mean;

    const Eigen::Map< const Eigen::VectorXd > rho(out.rho.data(), Mi);
    double                                    cell = 1.0;
    for (const double p : period)
        cell *= p;
    out.residual = (L * rho).norm() * std::sqrt(cell / static_cast< double >(M));
    return out;
}

/// A⁰ = ⟨A ρ⟩_Y by the periodic rectangle rule on the measure's grid.
template < int D >
HomogenizedTensor< D > homogenized_coefficient(const std::type_identity_t< MatrixCellFunction< D > >& A, const InvariantMeasure< D >& rho)
{
    require(!rho.rho.empty(), "homogenized_coefficient: empty measure");
    Matrix< D > s{};
    for (std::size_t k = 0; k < rho.rho.size(); ++k)
        s = s + rho.rho[k] * A(rho.node(k));
    s = (1.0 / static_cast< double >(rho.rho.size())) * s;
    for (int i = 0; i < D; ++i)
        for (int j = i + 1; j < D; ++j)
            s(j, i) = s(i, j);
    return {s, TensorProvenance::invariant_measure};
}

/// Homogenized constant-tensor solve: the macro scheme with F = A⁰ : ∇²_H U.
template < int D >
Trajectory< D > solve_homogenized(const HomogenizedTensor< D >& a0, const MacroGrid< D >& grid, double dt, double T, const std::type_identity_t< SpaceFunction< D > >& g, const std::type_identity_t< SpaceFunction< D > >& h, const std::type_identity_t< Forcing< D > >& f, std::vector< double > times = {}, const MacroOptions& opt = {})
{
    return solve_macro(grid, dt, T, g, h, f, TensorFlux< D >(a0.a0), std::move(times), opt);
}

/// Flux provider for direct simulation: A^ε sampled at the grid nodes.
template < int D >
NodalTensorFlux< D > dns_flux(const CoefficientField< D >& field, const MacroGrid< D >& grid)
{
    std::vector< Matrix< D > > a(grid.size());
    for (std::size_t k = 0; k < a.size(); ++k)
        a[k] = field(grid.coord(k));
    return NodalTensorFlux< D >(std::move(a));
}

/// Largest step dividing T that satisfies the leap-frog CFL with a 10% tightened speed bound.
template < int D >
double dns_time_step(const MacroGrid< D >& grid, double speed_bound, double T, double cfl = 0.9)
{
    require(cfl > 0.0 && cfl <= 1.0, "dns_time_step: cfl must be in (0, 1]");
    return fit_step(T, cfl * max_stable_dt(grid, 1.1 * speed_bound));
}

/// Fully resolved leap-frog simulation of u_tt = A^ε : ∇²u + f.
template < int D >
Trajectory< D > solve_dns(const CoefficientField< D >& field, const MacroGrid< D >& grid, double dt, double T, const std::type_identity_t< SpaceFunction< D > >& g, const std::type_identity_t< SpaceFunction< D > >& h, const std::type_identity_t< Forcing< D > >& f, std::vector< double > times = {}, const MacroOptions& opt = {})
{
    require(grid.H() <= field.epsilon() / 10.0 * (1.0 + 1e-12), "solve_dns: grid must resolve epsilon with at least 10 points");
    return solve_macro(grid, dt, T, g, h, f, dns_flux(field, grid), std::move(times), opt);
}

/// Streaming space-time kernel average (𝒦 u)(t_c, x) of a grid trajectory at a set of points, over
/// windows of full width `eta` (space) and `tau` (time). Feed every time level through observe();
/// levels outside the window are ignored.
template < int D >
class LocalAverager
{
public:
    LocalAverager(const MacroGrid< D >& grid, double dt, const Kernel& k_space, const Kernel& k_time, double eta, double tau, double t_center, std::vector< Point< D > > points)
        : grid_(grid), points_(std::move(points)), sums_(points_.size(), 0.0)
    {
        require(dt > 0.0 && eta > 0.0 && tau > 0.0, "LocalAverager: dt, eta and tau must be positive");
        const double lo = t_center - 0.5 * tau, hi = t_center + 0.5 * tau;
        n_lo_           = static_cast< long >(std::floor(lo / dt + 1e-9));
        n_hi_           = static_cast< long >(std::ceil(hi / dt - 1e-9));
        if (n_lo_ < 0)
            throw RangeError("local average: time window starts before t = 0");
        const auto nt = static_cast< std::size_t >(n_hi_ - n_lo_ + 1);
        detail::check_coverage(static_cast< double >(n_lo_) * dt, dt, nt, t_center, 0.5 * tau, "local time average");
        wt_   = detail::trapezoid_kernel_weights(k_time, 0.5 * tau, static_cast< double >(n_lo_) * dt, dt, nt, t_center);
        seen_.assign(nt, false);

        const double H = grid.H();
        for (const auto& x : points_)
        {
            Stencil st;
            for (int a = 0; a < D; ++a)
            {
                const long i0 = static_cast< long >(std::floor((x[a] - 0.5 * eta) / H + 1e-9));
                const long i1 = static_cast< long >(std::ceil((x[a] + 0.5 * eta) / H - 1e-9));
                if (grid.bc != BoundaryCondition::periodic && (i0 < 0 || i1 > grid.N))
                    throw RangeError("local average: spatial window leaves the domain");
                const auto n = static_cast< std::size_t >(i1 - i0 + 1);
                detail::check_coverage(static_cast< double >(i0) * H, H, n, x[a], 0.5 * eta, "local space average");
                st.w[a] = detail::trapezoid_kernel_weights(k_space, 0.5 * eta, static_cast< double >(i0) * H, H, n, x[a]);
                const long np = grid.nodes_per_axis();
                for (long i = i0; i <= i1; ++i)
                    st.idx[a].push_back(static_cast< int >(((i % np) + np) % np));
            }
            stencils_.push_back(std::move(st));
        }
    }

    void observe(long n, const std::vector< double >& u)
    {
        if (n < n_lo_ || n > n_hi_)
            return;
        require(u.size() == grid_.size(), "LocalAverager: field size does not match grid");
        const auto it = static_cast< std::size_t >(n - n_lo_);
        if (seen_[it])
            return;
        seen_[it] = true;
        if (wt_[it] == 0.0)
            return;
        for (std::size_t p = 0; p < points_.size(); ++p)
            sums_[p] += wt_[it] * spatial(stencils_[p], u);
    }

    bool complete() const
    {
        for (const bool s : seen_)
            if (!s)
                return false;
        return true;
    }

    long first_level() const { return n_lo_; }
    long last_level() const { return n_hi_; }

    std::vector< double > result() const
    {
        if (!complete())
            throw RangeError("local average: trajectory does not cover the time window");
        return sums_;
    }

private:
    struct Stencil
    {
        std::array< std::vector< int >, D >    idx;
        std::array< std::vector< double >, D > w;
    };

    double spatial(const Stencil& st, const std::vector< double >& u) const
    {
        double s = 0.0;
        if constexpr (D == 1)
        {
            for (std::size_t i = 0; i < st.idx[0].size(); ++i)
                s += st.w[0][i] * u[static_cast< std::size_t >(st.idx[0][i])];
        }
        else
        {
            const int np = grid_.nodes_per_axis();
            for (std::size_t i = 0; i < st.idx[0].size(); ++i)
            {
                double      row  = 0.0;
                const auto* base = u.data() + static_cast< std::size_t >(st.idx[0][i]) * np;
                for (std::size_t j = 0; j < st.idx[1].size(); ++j)
                    row += st.w[1][j] * base[st.idx[1][j]];
                s += st.w[0][i] * row;
            }
        }
        return s;
    }

    MacroGrid< D >            grid_;
    std::vector< Point< D > > points_;
    std::vector< double >     sums_;
    std::vector< double >     wt_;
    std::vector< bool >       seen_;
    std::vector< Stencil >    stencils_;
    long                      n_lo_ = 0;
    long                      n_hi_ = 0;
};

/// Kernel average of a stored trajectory (snapshots at multiples of dt) at the given points.
template < int D >
std::vector< double > local_average_field(const Trajectory< D >& traj, double dt, const Kernel& k_space, const Kernel& k_time, double eta, double tau, double t_center, std::vector< Point< D > > points)
{
    LocalAverager< D > avg(traj.grid, dt, k_space, k_time, eta, tau, t_center, std::move(points));
    for (const auto& s : traj.snapshots)
    {
        const long n = std::lround(s.t / dt);
        if (std::abs(s.t - static_cast< double >(n) * dt) <= 1e-9 * dt)
            avg.observe(n, s.values);
    }
    return avg.result();
}
} // namespace efa

#endif // EFA_REFERENCE_HPP
