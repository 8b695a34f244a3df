#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace hgf
{

struct QuadratureResult
{
    double value = 0.0;
    double error = 0.0;
    int intervals = 0;
    bool converged = false;
};

/// 15-point Kronrod rule with embedded 7-point Gauss rule on [a, b].
/// Returns (Kronrod estimate, |Kronrod - Gauss|).
template <class F>
std::pair<double, double> gauss_kronrod15(F&& f, double a, double b)
{
    static constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                                      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                                      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                                      0.207784955007898467600689403773245, 0.0};
    static constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    static constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                     0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * wgk[7];
    double gauss = fc * wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * xgk[j];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += wgk[j] * pair;
        if (j % 2 == 1) gauss += wg[j / 2] * pair;
    }
    kronrod *= half;
    gauss *= half;
    return {kronrod, std::abs(kronrod - gauss)};
}

/**
 * Adaptive bisection on top of gauss_kronrod15. Intervals are refined until
 * each local error estimate is below rel_tol times the running total scaled by
 * the interval's share of [a, b]. Accumulation runs left to right.
 */
template <class F>
QuadratureResult integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-13, int max_intervals = 20000)
{
    QuadratureResult out;
    const double whole = b - a;
    const double rough = std::abs(gauss_kronrod15(f, a, b).first);

    struct Span
    {
        double a, b;
    };
    std::vector<Span> stack{{a, b}};
    while (!stack.empty()) {
        const Span s = stack.back();
        stack.pop_back();
        const auto [value, err] = gauss_kronrod15(f, s.a, s.b);
        const double share = (s.b - s.a) / whole;
        const double budget = rel_tol * std::max(rough, std::abs(out.value) + std::abs(value)) * share;
        const bool too_small = (s.b - s.a) <= 1e-12 * std::abs(whole);
        if (err <= budget || too_small || out.intervals + static_cast<int>(stack.size()) >= max_intervals) {
            out.value += value;
            out.error += err;
            ++out.intervals;
            continue;
        }
        const double mid = 0.5 * (s.a + s.b);
        stack.push_back({mid, s.b});
        stack.push_back({s.a, mid});
    }
    out.converged = out.error <= 10.0 * rel_tol * std::abs(out.value) || out.value == 0.0;
    return out;
}

} // namespace hgf
