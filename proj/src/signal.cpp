#include "signal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "errors.hpp"

namespace bm {

namespace {

constexpr char kTraceHeader[] = "time_s,current_ma";

double parse_double(std::string_view text, std::size_t row, const char* what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw parse_error("row " + std::to_string(row) + ": malformed " + what + " '" +
                          std::string(text) + "'");
    }
    return value;
}

std::pair<double, double> parse_row(const std::string& line, std::size_t row) {
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
        throw parse_error("row " + std::to_string(row) + ": expected '<time>,<current>'");
    }
    const double t = parse_double(std::string_view(line).substr(0, comma), row, "time");
    const double c = parse_double(std::string_view(line).substr(comma + 1), row, "current");
    if (!std::isfinite(t) || !std::isfinite(c)) {
        throw parse_error("row " + std::to_string(row) + ": non-finite value");
    }
    return {t, c};
}

// Linear interpolation of (ts, cs) at time t; ts strictly increasing.
double interp_at(const std::vector<double>& ts, const std::vector<double>& cs, double t) {
    if (t <= ts.front()) return cs.front();
    if (t >= ts.back()) return cs.back();
    const auto it = std::upper_bound(ts.begin(), ts.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - ts.begin());
    const std::size_t lo = hi - 1;
    const double f = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return cs[lo] + f * (cs[hi] - cs[lo]);
}

// ---- FIR design and zero-phase application ----------------------------------

std::vector<double> design_kernel(const FilterSpec& spec, double sample_rate_hz) {
    const double df = spec.stop_freq_hz - spec.pass_freq_hz;
    const double fc = 0.5 * (spec.pass_freq_hz + spec.stop_freq_hz);
    // Hamming window: ~53 dB stopband, transition width ~3.3/N of fs.
    std::size_t n = static_cast<std::size_t>(std::ceil(3.3 * sample_rate_hz / df));
    if (n % 2 == 0) ++n;
    n = std::max<std::size_t>(n, 5);
    const double m = static_cast<double>(n - 1) / 2.0;
    const double w = 2.0 * fc / sample_rate_hz;
    std::vector<double> h(n);
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) - m;
        const double s = (x == 0.0) ? w : std::sin(3.14159265358979323846 * w * x) /
                                              (3.14159265358979323846 * x);
        const double win =
            0.54 - 0.46 * std::cos(2.0 * 3.14159265358979323846 * k / (n - 1));
        h[k] = s * win;
        sum += h[k];
    }
    for (double& v : h) v /= sum;  // unit DC gain
    return h;
}

// Reflected ("bounced") sample for out-of-range indices.
double reflect_sample(const std::vector<double>& x, long long i) {
    const long long n = static_cast<long long>(x.size());
    if (n == 1) return x[0];
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * (n - 1) - i;
    }
    return x[static_cast<std::size_t>(i)];
}

void convolve_direct(const std::vector<double>& padded, const std::vector<double>& h,
                     std::vector<double>& out) {
    const std::size_t n = out.size();
    const std::size_t k = h.size();
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* xp = padded.data() + i;
        for (std::size_t j = 0; j < k; ++j) acc += h[j] * xp[j];
        out[i] = acc;
    }
}

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

// Overlap-save evaluation of out[i] = sum_j h[j] * padded[i + j].
void convolve_overlap_save(const std::vector<double>& padded, const std::vector<double>& h,
                           std::vector<double>& out) {
    const std::size_t n = out.size();
    const std::size_t k = h.size();
    std::size_t block = 1;
    while (block < 4 * k) block <<= 1;
    block = std::min<std::size_t>(std::max<std::size_t>(block, 1 << 13), 1 << 21);
    if (block < 2 * k) {  // kernel too large for the cap; grow anyway
        block = 1;
        while (block < 2 * k) block <<= 1;
    }
    const std::size_t step = block - k + 1;
    const std::size_t nbins = block / 2 + 1;

    double* buf = fftw_alloc_real(block);
    fftw_complex* spec = fftw_alloc_complex(nbins);
    fftw_complex* hspec = fftw_alloc_complex(nbins);
    fftw_plan fwd, bwd;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(block), buf, spec, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(block), spec, buf, FFTW_ESTIMATE);
    }

    std::fill(buf, buf + block, 0.0);
    std::copy(h.begin(), h.end(), buf);
    fftw_execute(fwd);
    std::memcpy(hspec, spec, nbins * sizeof(fftw_complex));

    const double scale = 1.0 / static_cast<double>(block);
    for (std::size_t pos = 0; pos < n; pos += step) {
        const std::size_t want = std::min(step, n - pos);
        const std::size_t avail = std::min(block, padded.size() - pos);
        std::copy(padded.begin() + static_cast<long long>(pos),
                  padded.begin() + static_cast<long long>(pos + avail), buf);
        std::fill(buf + avail, buf + block, 0.0);
        fftw_execute(fwd);
        for (std::size_t b = 0; b < nbins; ++b) {
            // X * conj(H): circular correlation of the block with h.
            const double xr = spec[b][0], xi = spec[b][1];
            const double hr = hspec[b][0], hi = hspec[b][1];
            spec[b][0] = (xr * hr + xi * hi) * scale;
            spec[b][1] = (xi * hr - xr * hi) * scale;
        }
        fftw_execute(bwd);
        std::copy(buf, buf + want, out.begin() + static_cast<long long>(pos));
    }

    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    fftw_free(buf);
    fftw_free(spec);
    fftw_free(hspec);
}

}  // namespace

void validate(const PowerTrace& trace) {
    if (!(trace.sample_rate_hz > 0.0)) throw std::invalid_argument("sample_rate_hz must be positive");
    if (trace.samples.empty()) throw std::invalid_argument("trace has no samples");
    for (double v : trace.samples) {
        if (!std::isfinite(v)) throw std::invalid_argument("trace contains non-finite samples");
    }
}

PowerTrace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open trace file: " + path);

    std::vector<double> ts, cs;
    std::string line;
    std::size_t row = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == kTraceHeader) continue;
        }
        if (line.empty()) continue;
        const auto [t, c] = parse_row(line, row);
        if (!ts.empty() && t <= ts.back()) {
            throw parse_error("row " + std::to_string(row) + ": non-increasing timestamp");
        }
        ts.push_back(t);
        cs.push_back(c);
    }
    if (ts.size() < 2) throw parse_error("fewer than 2 samples");

    const double span = ts.back() - ts.front();
    double min_dt = span;
    bool uniform = true;
    const double dt0 = ts[1] - ts[0];
    for (std::size_t i = 1; i < ts.size(); ++i) {
        const double d = ts[i] - ts[i - 1];
        min_dt = std::min(min_dt, d);
        if (std::abs(d - dt0) > 1e-9 * std::max(d, dt0)) uniform = false;
    }

    PowerTrace trace;
    trace.start_time_s = ts.front();
    if (uniform) {
        trace.sample_rate_hz = static_cast<double>(ts.size() - 1) / span;
        trace.samples = std::move(cs);
        return trace;
    }
    // Non-uniform input: resample at the smallest observed step so no input
    // feature is skipped over.
    const std::size_t count = static_cast<std::size_t>(std::floor(span / min_dt + 1e-9)) + 1;
    trace.sample_rate_hz = 1.0 / min_dt;
    trace.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        trace.samples[i] = interp_at(ts, cs, ts.front() + static_cast<double>(i) * min_dt);
    }
    return trace;
}

void save_trace(const PowerTrace& trace, const std::string& path) {
    validate(trace);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw io_error("cannot write trace file: " + path);
    out << kTraceHeader << '\n';
    char buf[64];
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f,%.6g\n", trace.time_at(i), trace.samples[i]);
        out << buf;
    }
    out.flush();
    if (!out) throw io_error("write failed: " + path);
}

PowerTrace lowpass(const PowerTrace& trace, const FilterSpec& spec) {
    validate(trace);
    if (!(spec.pass_freq_hz > 0.0) || !(spec.stop_freq_hz > spec.pass_freq_hz)) {
        throw std::invalid_argument("filter spec requires 0 < pass_freq_hz < stop_freq_hz");
    }
    if (spec.stop_freq_hz >= 0.5 * trace.sample_rate_hz) {
        throw std::invalid_argument("filter frequencies exceed Nyquist");
    }

    const auto h = design_kernel(spec, trace.sample_rate_hz);
    const std::size_t n = trace.samples.size();
    const std::size_t half = h.size() / 2;

    std::vector<double> padded(n + h.size() - 1);
    for (std::size_t i = 0; i < padded.size(); ++i) {
        padded[i] =
            reflect_sample(trace.samples, static_cast<long long>(i) - static_cast<long long>(half));
    }

    PowerTrace out;
    out.sample_rate_hz = trace.sample_rate_hz;
    out.start_time_s = trace.start_time_s;
    out.samples.resize(n);
    if (static_cast<double>(n) * static_cast<double>(h.size()) <= 4.0e6) {
        convolve_direct(padded, h, out.samples);
    } else {
        convolve_overlap_save(padded, h, out.samples);
    }
    return out;
}

FilterSpec default_filter_for_period(double bit_period_s, double sample_rate_hz) {
    if (!(bit_period_s > 0.0)) throw std::invalid_argument("bit_period_s must be positive");
    if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("sample_rate_hz must be positive");
    FilterSpec spec;
    spec.stop_freq_hz = std::min(12.0 / bit_period_s, 0.45 * sample_rate_hz);
    spec.pass_freq_hz = std::min(6.0 / bit_period_s, 0.5 * spec.stop_freq_hz);
    return spec;
}

}  // namespace bm
