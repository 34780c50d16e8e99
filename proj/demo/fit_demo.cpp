// Fit a noisy regression curve and a density sample, print what was selected.

#include "legadapt/confidence.hpp"
#include "legadapt/estimators.hpp"
#include "legadapt/synth/simulate.hpp"
#include "legadapt/synth/truth.hpp"

#include <cmath>
#include <cstdio>

using namespace legadapt;

namespace
{

void show(const char* label, const FitResult& fr, const synth::SyntheticModel& truth)
{
    const auto conf = aci_radius(fr.scan);
    std::printf("%s: n = %zu, N(n) = %zu, tau* = %.3g\n", label, fr.fit.n, fr.fit.n_selected, fr.scan.tau_star);
    if (conf.radius)
        std::printf("  gamma^ = %.3f, ISE bound = %.3g\n", conf.gamma_hat, *conf.radius);
    else
        std::printf("  no interval (%s)\n", std::string(to_string(conf.degeneracy)).c_str());
    std::printf("  actual ISE = %.3g\n", ise_parseval(fr.fit, truth.coeffs()));
    for (double x : {-0.75, 0.0, 0.75})
        std::printf("  f^(%+.2f) = %.4f   f = %.4f\n", x, evaluate(fr.fit, x), truth(x));
}

} // namespace

int main()
{
    // f(x) = exp(x) sin(3x) observed with gaussian noise on the grid x_i = -1 + 2i/n.
    const auto f = [](double x) { return std::exp(x) * std::sin(3.0 * x); };
    const auto truth = synth::make_truth(synth::ClassSpec::from_coeffs(synth::quadrature_coeffs(f, 60)), 0);
    const auto sample = synth::simulate_regression(truth, synth::NoiseModel{synth::NoiseKind::gaussian, 0.3}, 4096, 11);
    show("regression", fit_adaptive(sample), truth);

    // Density with coefficients decaying like k^-1: W(beta = 1) shrunk to stay positive.
    const auto dens = synth::make_density_truth(synth::ClassSpec::w(0.05, 0.0, 1.0), 64);
    show("density", fit_adaptive(synth::simulate_density(dens, 4096, 12)), dens);
}
