#include "deconflict/util.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

namespace deconflict {

std::optional<LinearFit> least_squares(std::span<const double> x,
                                       std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size() || n < 2) return std::nullopt;

    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / static_cast<double>(n);
    const double my = sy / static_cast<double>(n);

    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) return std::nullopt;  // all x identical

    LinearFit fit;
    fit.n = static_cast<int>(n);
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;

    if (n > 2) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double r = y[i] - (fit.slope * x[i] + fit.intercept);
            ss_res += r * r;
        }
        fit.slope_stderr =
            std::sqrt(ss_res / (static_cast<double>(n) - 2.0) / sxx);
    }
    return fit;
}

int max_threads() {
    if (const char* env = std::getenv("DECONFLICT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(max_threads()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace deconflict
