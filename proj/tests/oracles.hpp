#pragma once
// Reference values for the tests. Nothing here calls into the library.
// Frozen numbers were computed with mpmath at 30 digits.

#include <cmath>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

namespace oracle {

inline constexpr double kC025 = 0.19947114020071633897;
inline constexpr double kC050 = 0.31830988618379067154;  // 1/pi
inline constexpr double kC075 = 0.29920671030107450845;

// (-Delta)^s (r^2 - x^2)_+^s inside the ball: 4^s Gamma(1/2+s) Gamma(1+s) / Gamma(1/2)
inline constexpr double kGetoor025 = 0.88622692545275801365;
inline constexpr double kGetoor050 = 1.0;
inline constexpr double kGetoor075 = 1.3293403881791370205;

// (-Delta)^s exp(-x^2) at x = 0: 4^s Gamma(s+1/2) / sqrt(pi)
inline constexpr double kGauss0_025 = 0.97774106744692379763;
inline constexpr double kGauss0_050 = 1.1283791670955125739;
inline constexpr double kGauss0_075 = 1.4464090846320771425;

// Omega = (0,1), u(x) = x, exterior point y = 2.
inline constexpr double kRho2_050 = 0.5;
inline constexpr double kUN2_025 = 0.58578643762690495;
inline constexpr double kUN2_050 = 0.61370563888010938;  // 2 - 2 ln 2
inline constexpr double kUN2_075 = 0.64075448203408147;

// Full-line energy pairing of unit-width hats k nodes apart, k = 0..3; scales as h^{1-2s}.
inline constexpr double kHat025[4] = {0.70505516009098073, -0.0082894311840177167, -0.08781061629327394,
                                      -0.041484454897162665};
inline constexpr double kHat050[4] = {0.88254240061060637, -0.19143861467394375, -0.11678794191483139,
                                      -0.040136107622598875};
inline constexpr double kHat075[4] = {1.2463732120272484, -0.46939225500798843, -0.098912715822339537,
                                      -0.023163080698055638};

inline const double* hat_entries(double s) {
    return s == 0.25 ? kHat025 : s == 0.5 ? kHat050 : kHat075;
}
inline double c1s(double s) {
    return s == 0.25 ? kC025 : s == 0.5 ? kC050 : kC075;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss(int n) {
    std::vector<double> x(n), w(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

// Composite Gauss on [a,b] with equal panels.
inline double composite(const std::function<double(double)>& f, double a, double b, int panels = 64,
                        int order = 20) {
    static const auto rule = gauss(20);
    const auto& [x, w] = order == 20 ? rule : gauss(order);
    const double H = (b - a) / panels;
    double acc = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * H;
        for (size_t i = 0; i < x.size(); ++i) acc += w[i] * f(c + 0.5 * H * x[i]);
    }
    return 0.5 * H * acc;
}

// int_lo^hi r^{-1-2s} dr in the variable u = ln r.
inline double radial(double lo, double hi, double s) {
    return composite([s](double u) { return std::exp(-2.0 * s * u); }, std::log(lo), std::log(hi));
}

// rho for x outside (a,b)
inline double rho(double a, double b, double s, double x) {
    const double d = x < a ? a - x : x - b;
    return radial(d, d + (b - a), s);
}

// kappa for x inside (a,b): C times both exterior half-lines
inline double kappa(double a, double b, double s, double x) {
    auto half = [s](double d) { return radial(d, d * std::exp(20.0 / s), s); };
    return c1s(s) * (half(x - a) + half(b - x));
}

}  // namespace oracle
