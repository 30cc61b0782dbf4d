#include "rough/fbm.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <random>
#include <thread>

#include "rough/lift.hpp"

namespace rough {

double fbm_cov(double s, double t, double H) {
    auto p = [H](double u) { return std::pow(std::abs(u), 2.0 * H); };
    return 0.5 * (p(t) + p(s) - p(t - s));
}

FbmSpec::FbmSpec(double H_, int d_, const Grid& g, uint64_t seed_)
    : H(H_), d(d_), grid(g), seed(seed_) {
    if (!(H > 0.25 && H < 1.0)) throw ConfigError("FbmSpec: H must lie in (1/4, 1)");
    if (d < 1) throw ConfigError("FbmSpec: dimension must be >= 1");
    if (g.n < 1) throw ConfigError("FbmSpec: grid too short");
    grid.index_of(0.0);  // the pinning point must be a grid point
}

namespace {

// Autocovariance of unit-step fractional Gaussian noise.
double fgn_gamma(int k, double H) {
    double a = std::abs(static_cast<double>(k));
    return 0.5 * (std::pow(a + 1.0, 2 * H) - 2.0 * std::pow(a, 2 * H) +
                  std::pow(std::abs(a - 1.0), 2 * H));
}

std::mutex fftw_mutex;  // FFTW planning is not thread-safe

// One fGn sequence of length N (unit step) by Davies-Harte circulant embedding.
// Returns false if the embedding has a significantly negative eigenvalue.
bool fgn_circulant(int N, double H, std::mt19937_64& rng, std::vector<double>& out) {
    int M = 2 * N;
    std::vector<std::complex<double>> buf(M), freq(M);
    for (int j = 0; j <= N; ++j) buf[j] = fgn_gamma(j, H);
    for (int j = N + 1; j < M; ++j) buf[j] = fgn_gamma(M - j, H);

    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        plan = fftw_plan_dft_1d(M, reinterpret_cast<fftw_complex*>(buf.data()),
                                reinterpret_cast<fftw_complex*>(freq.data()), FFTW_FORWARD,
                                FFTW_ESTIMATE);
    }
    fftw_execute(plan);

    double lmax = 0.0, lmin = 0.0;
    std::vector<double> lambda(M);
    for (int j = 0; j < M; ++j) {
        lambda[j] = freq[j].real();
        lmax = std::max(lmax, lambda[j]);
        lmin = std::min(lmin, lambda[j]);
    }
    if (lmin < -1e-8 * lmax) {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
        return false;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (double& l : lambda) l = std::max(l, 0.0);
    buf[0] = std::sqrt(lambda[0] / M) * gauss(rng);
    buf[N] = std::sqrt(lambda[N] / M) * gauss(rng);
    for (int j = 1; j < N; ++j) {
        double re = gauss(rng), im = gauss(rng);
        double amp = std::sqrt(lambda[j] / (2.0 * M));
        buf[j] = std::complex<double>(amp * re, amp * im);
        buf[M - j] = std::conj(buf[j]);
    }
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(freq.data()));
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }
    out.resize(N);
    for (int j = 0; j < N; ++j) out[j] = freq[j].real();
    return true;
}

// Dense factorization fallback: exact but O(N^3) once per call.
bool fgn_cholesky(int N, double H, std::mt19937_64& rng, std::vector<double>& out) {
    Eigen::MatrixXd cov(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) cov(i, j) = fgn_gamma(i - j, H);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) return false;
    Eigen::VectorXd g(N);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < N; ++i) g(i) = gauss(rng);
    Eigen::VectorXd x = llt.matrixL() * g;
    out.assign(x.data(), x.data() + N);
    return true;
}

}  // namespace

Path1 sample_fbm(const FbmSpec& spec) {
    const Grid& g = spec.grid;
    int N = g.n;
    int i0 = g.index_of(0.0);
    Path1 path(g, spec.d);
    std::mt19937_64 rng(spec.seed);
    double scale = std::pow(g.h, spec.H);
    std::vector<double> inc;
    for (int c = 0; c < spec.d; ++c) {
        if (!fgn_circulant(N, spec.H, rng, inc) && !fgn_cholesky(N, spec.H, rng, inc))
            throw EmbeddingFailed("sample_fbm: circulant embedding and factorization both failed");
        double acc = 0.0;
        path.at(0, c) = 0.0;
        for (int i = 0; i < N; ++i) {
            acc += inc[i] * scale;
            path.at(i + 1, c) = acc;
        }
        double pin = path.at(i0, c);
        for (int i = 0; i <= N; ++i) path.at(i, c) -= pin;
    }
    return path;
}

double expected_diag_area(double v1, double tau, double H) {
    if (tau <= 0.0) throw ConfigError("expected_diag_area: tau must be positive");
    if (v1 == 0.0) return 0.5 * std::pow(tau, 2 * H);
    if (v1 > 0.0)
        return -H * std::pow(v1, 2 * H - 1) * tau +
               0.5 * (std::pow(tau + v1, 2 * H) - std::pow(v1, 2 * H));
    double w = -v1;
    return H * std::pow(w, 2 * H - 1) * tau +
           0.5 * (std::pow(std::abs(tau + v1), 2 * H) - std::pow(w, 2 * H));
}

namespace {

// Deterministic parallel map over sample indices: results land in a vector,
// reduced in index order by the caller.
template <typename F>
void parallel_samples(int N, int workers, F&& body) {
    workers = std::max(1, workers);
    if (workers == 1) {
        for (int i = 0; i < N; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < N; i = next.fetch_add(1)) body(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace

McAreaReport mc_validate_area(double H, double v1, int N, int n, double tau, uint64_t seed,
                              int workers) {
    if (N < 1) throw ConfigError("mc_validate_area: need N >= 1");
    if (n < 2) throw ConfigError("mc_validate_area: need n >= 2");
    double h = tau / n;
    double u = v1 / h;
    int kv = static_cast<int>(std::lround(u));
    if (std::abs(u - kv) > 1e-9) throw DelayNotOnGrid("mc_validate_area: v1 not a grid multiple");

    // Extended grid: reach back to -2|v1| (volume families of the lift) and
    // forward past tau when v1 < 0.
    int back = 2 * std::abs(kv);
    int fwd = std::max(0, -kv);
    Grid grid(-back * h, h, n + back + fwd);
    std::vector<double> delays;
    if (kv != 0) delays.push_back(std::abs(v1));

    std::vector<double> vals(N);
    parallel_samples(N, workers, [&](int s) {
        FbmSpec spec(H, 1, grid, seed + static_cast<uint64_t>(s));
        Path1 x = sample_fbm(spec);
        DelayedLift L = DelayedLift::build(x, delays);
        int i0 = grid.index_of(0.0);
        double a;
        L.area(kv, i0, i0 + n, &a);
        vals[s] = a;
    });
    double mean = 0.0;
    for (double v : vals) mean += v;
    mean /= N;
    double var = 0.0;
    for (double v : vals) var += (v - mean) * (v - mean);
    var /= std::max(1, N - 1);
    double se = std::sqrt(var / N);
    double cf = expected_diag_area(v1, tau, H);
    McAreaReport rep;
    rep.H = H;
    rep.v1 = v1;
    rep.tau = tau;
    rep.N = N;
    rep.n = n;
    rep.mean = mean;
    rep.stderr_ = se;
    rep.closed_form = cf;
    rep.z = se > 0 ? std::abs(mean - cf) / se : 0.0;
    return rep;
}

ScalingReport mc_scaling_exponent(int level, double H, double v1, double v2,
                                  const std::vector<double>& taus, int N, int n_per_unit,
                                  uint64_t seed, int workers) {
    if (level != 2 && level != 3) throw ConfigError("mc_scaling_exponent: level must be 2 or 3");
    if (v1 < 0 || v2 < 0) throw ConfigError("mc_scaling_exponent: nonnegative delays expected");
    if (taus.size() < 2) throw ConfigError("mc_scaling_exponent: need at least two spans");
    double tmax = *std::max_element(taus.begin(), taus.end());
    double h = 1.0 / n_per_unit;
    double rq = std::max(v1, v2);
    int back = 2 * static_cast<int>(std::lround(rq / h));
    if (rq > 0 && std::abs(back / 2 - rq / h) > 1e-9)
        throw DelayNotOnGrid("mc_scaling_exponent: delays must be grid multiples");
    int n = static_cast<int>(std::lround(tmax / h));
    Grid grid(-back * h, h, n + back);

    std::vector<double> delays;
    if (rq > 0) delays.push_back(rq);
    int k1 = static_cast<int>(std::lround(v1 / h));
    int k2 = static_cast<int>(std::lround(v2 / h));

    size_t nt = taus.size();
    std::vector<double> sums(static_cast<size_t>(N) * nt, 0.0);
    parallel_samples(N, workers, [&](int s) {
        FbmSpec spec(H, 1, grid, seed + static_cast<uint64_t>(s));
        Path1 x = sample_fbm(spec);
        DelayedLift L = DelayedLift::build(x, delays);
        int i0 = grid.index_of(0.0);
        for (size_t t = 0; t < nt; ++t) {
            int span = static_cast<int>(std::lround(taus[t] / h));
            double val;
            if (level == 2) {
                // x2(v1, v2)_{0,tau} via the shift identity
                L.area(k1, i0 - k2, i0 - k2 + span, &val);
            } else {
                L.volume(k1, k2, i0, i0 + span, &val);
            }
            sums[static_cast<size_t>(s) * nt + t] = val * val;
        }
    });

    ScalingReport rep;
    rep.level = level;
    rep.H = H;
    rep.v1 = v1;
    rep.v2 = v2;
    rep.taus = taus;
    rep.second_moments.assign(nt, 0.0);
    for (int s = 0; s < N; ++s)
        for (size_t t = 0; t < nt; ++t) rep.second_moments[t] += sums[static_cast<size_t>(s) * nt + t];
    for (double& m : rep.second_moments) m /= N;

    // least-squares slope in log-log coordinates
    double mx = 0, my = 0;
    for (size_t t = 0; t < nt; ++t) {
        mx += std::log(taus[t]);
        my += std::log(rep.second_moments[t]);
    }
    mx /= nt;
    my /= nt;
    double num = 0, den = 0;
    for (size_t t = 0; t < nt; ++t) {
        double dx = std::log(taus[t]) - mx;
        num += dx * (std::log(rep.second_moments[t]) - my);
        den += dx * dx;
    }
    rep.slope = num / den;
    return rep;
}

}  // namespace rough
