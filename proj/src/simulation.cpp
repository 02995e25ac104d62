#include "fmatch/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fmatch/error.hpp"
#include "fmatch/rng.hpp"

namespace fmatch {
namespace {

class InnovationSource {
public:
    InnovationSource(std::uint64_t seed, double sigma2, const Innovations& law) : rng_(seed), law_(law) {
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) {
            throw Error(ErrorKind::InvalidArgument, "sigma2 must be positive and finite");
        }
        if (law.kind == InnovationKind::StudentT && !(law.df > 2.0)) {
            throw Error(ErrorKind::InvalidArgument, "Student-t innovations need df > 2");
        }
        scale_ = std::sqrt(sigma2);
        if (law.kind == InnovationKind::StudentT) scale_ *= std::sqrt((law.df - 2.0) / law.df);
    }

    double operator()() noexcept {
        const double z = law_.kind == InnovationKind::Gaussian ? rng_.normal() : rng_.student_t(law_.df);
        return scale_ * z;
    }

private:
    CounterRng rng_;
    Innovations law_;
    double scale_ = 1.0;
};

}  // namespace

std::vector<double> simulate_arma(const ArmaSpec& spec, std::size_t n, std::uint64_t seed,
                                  std::size_t burnin, const Innovations& innovations) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    if (!is_stationary(spec.ar)) {
        throw Error(ErrorKind::NonStationary, "AR part is outside the stationary region");
    }
    InnovationSource draw(seed, spec.sigma2, innovations);
    const std::size_t p = spec.ar.size();
    const std::size_t q = spec.ma.size();
    const std::size_t total = burnin + std::max(p, q) + n;

    std::vector<double> y(total);
    std::vector<double> e(total);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = draw();
        double v = e[t];
        for (std::size_t i = 1; i <= std::min(p, t); ++i) v += spec.ar[i - 1] * y[t - i];
        for (std::size_t j = 1; j <= std::min(q, t); ++j) v += spec.ma[j - 1] * e[t - j];
        y[t] = v;
    }
    return {y.end() - static_cast<std::ptrdiff_t>(n), y.end()};
}

std::vector<double> simulate_tar(const TarSpec& spec, std::size_t n, std::uint64_t seed,
                                 std::size_t burnin, const Innovations& innovations) {
    if (n == 0) throw Error(ErrorKind::InvalidArgument, "n must be >= 1");
    if (spec.delay == 0) throw Error(ErrorKind::InvalidArgument, "threshold delay must be >= 1");
    if (!is_stationary(spec.phi_low) || !is_stationary(spec.phi_high)) {
        throw Error(ErrorKind::NonStationary, "a TAR regime is outside the stationary region");
    }
    InnovationSource draw(seed, spec.sigma2, innovations);
    const std::size_t p = std::max(spec.phi_low.size(), spec.phi_high.size());
    const std::size_t total = burnin + p + n;

    std::vector<double> y(total);
    for (std::size_t t = 0; t < total; ++t) {
        const double trigger = t >= spec.delay ? y[t - spec.delay] : 0.0;
        const auto& phi = trigger <= spec.threshold ? spec.phi_low : spec.phi_high;
        double v = draw();
        for (std::size_t i = 1; i <= std::min(phi.size(), t); ++i) v += phi[i - 1] * y[t - i];
        y[t] = v;
    }
    return {y.end() - static_cast<std::ptrdiff_t>(n), y.end()};
}

std::vector<double> sample_acvf(const std::vector<double>& y, std::size_t max_lag) {
    std::vector<double> out(max_lag + 1, 0.0);
    const std::size_t n = y.size();
    for (std::size_t k = 0; k <= max_lag && k < n; ++k) {
        double acc = 0.0;
        for (std::size_t t = 0; t + k < n; ++t) acc += y[t] * y[t + k];
        out[k] = acc / static_cast<double>(n);
    }
    return out;
}

}  // namespace fmatch
