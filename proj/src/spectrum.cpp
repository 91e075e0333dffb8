#include "qpg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <vector>
#include <sstream>

#include "qpg/units.hpp"

namespace qpg {

std::string to_string(AxisKind kind) {
  switch (kind) {
    case AxisKind::wavelength_nm: return "wavelength_nm";
    case AxisKind::angular_frequency: return "angular_frequency";
    case AxisKind::detuning: return "detuning";
  }
  return "unknown";
}

AxisKind axis_kind_from_string(const std::string& s) {
  if (s == "wavelength_nm") return AxisKind::wavelength_nm;
  if (s == "angular_frequency") return AxisKind::angular_frequency;
  if (s == "detuning") return AxisKind::detuning;
  throw ParseError("unknown axis kind '" + s + "'");
}

void Spectrum::validate() const {
  if (axis.size() != intensity.size()) throw ConfigError("spectrum axis/intensity size mismatch");
  if (axis.size() == 0) throw ConfigError("empty spectrum");
  for (Eigen::Index i = 0; i + 1 < axis.size(); ++i) {
    if (!(axis(i + 1) > axis(i))) throw ConfigError("spectrum axis must be strictly increasing");
  }
  if ((intensity.array() < 0.0).any()) throw ConfigError("spectrum intensity must be >= 0");
  if (amplitude) {
    if (amplitude->size() != axis.size()) throw ConfigError("amplitude size mismatch");
    const double scale = std::max(intensity.maxCoeff(), 1e-300);
    for (Eigen::Index i = 0; i < axis.size(); ++i) {
      if (std::abs(std::norm((*amplitude)(i)) - intensity(i)) > 1e-12 * scale) {
        throw ConfigError("spectrum intensity != |amplitude|^2");
      }
    }
  }
}

Spectrum Spectrum::peak_normalized() const {
  Spectrum out = *this;
  const double peak = intensity.maxCoeff();
  if (peak > 0.0) {
    out.intensity /= peak;
    if (out.amplitude) *out.amplitude /= std::sqrt(peak);
  }
  return out;
}

Spectrum resample(const Spectrum& s, const Eigen::VectorXd& new_axis) {
  Spectrum out;
  out.axis_kind = s.axis_kind;
  out.axis = new_axis;
  out.intensity.resize(new_axis.size());
  out.temperature_c = s.temperature_c;
  out.device_id = s.device_id;
  out.resolution_sigma = s.resolution_sigma;
  for (Eigen::Index i = 0; i < new_axis.size(); ++i) {
    const double x = new_axis(i);
    if (x <= s.axis(0)) {
      out.intensity(i) = s.intensity(0);
      continue;
    }
    if (x >= s.axis(s.size() - 1)) {
      out.intensity(i) = s.intensity(s.size() - 1);
      continue;
    }
    const double* begin = s.axis.data();
    const double* it = std::upper_bound(begin, begin + s.size(), x);
    const Eigen::Index j = it - begin;  // first sample > x, j >= 1
    const double t = (x - s.axis(j - 1)) / (s.axis(j) - s.axis(j - 1));
    out.intensity(i) = (1.0 - t) * s.intensity(j - 1) + t * s.intensity(j);
  }
  return out;
}

Spectrum convolve_resolution(const Spectrum& s, const ResolutionKernel& kernel) {
  s.validate();
  if (kernel.sigma < 0.0) throw ConfigError("resolution sigma must be >= 0");
  if (kernel.sigma == 0.0) return s;

  const Eigen::Index n = s.size();
  if (n > 1) {
    const double dx = s.axis(1) - s.axis(0);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      if (std::abs((s.axis(i + 1) - s.axis(i)) - dx) > 1e-6 * std::abs(dx)) {
        throw ConfigError("convolve_resolution requires a uniform axis; resample first");
      }
    }
  }
  const double dx = n > 1 ? s.axis(1) - s.axis(0) : 1.0;
  const double sigma_bins = kernel.sigma / dx;
  const Eigen::Index half = std::max<Eigen::Index>(1, static_cast<Eigen::Index>(std::ceil(6.0 * sigma_bins)));
  Eigen::VectorXd k(2 * half + 1);
  for (Eigen::Index i = -half; i <= half; ++i) {
    k(i + half) = std::exp(-0.5 * (i / sigma_bins) * (i / sigma_bins));
  }
  k /= k.sum();

  auto reflect = [n](Eigen::Index i) {
    while (i < 0 || i >= n) {
      if (i < 0) i = -i - 1;
      if (i >= n) i = 2 * n - 1 - i;
    }
    return i;
  };

  Spectrum out = s;
  out.amplitude.reset();  // intensity-domain operation
  out.resolution_sigma = kernel.sigma;
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = -half; j <= half; ++j) {
      acc += k(j + half) * s.intensity(reflect(i + j));
    }
    out.intensity(i) = acc;
  }
  return out;
}

namespace {

// Interpolated crossing of `level` between samples i and i+1.
double crossing(const Spectrum& s, Eigen::Index i, double level) {
  const double y0 = s.intensity(i), y1 = s.intensity(i + 1);
  const double t = (level - y0) / (y1 - y0);
  return s.axis(i) + t * (s.axis(i + 1) - s.axis(i));
}

}  // namespace

double bandwidth(const Spectrum& s, BandwidthMetric metric) {
  s.validate();
  Eigen::Index peak_idx = 0;
  const double peak = s.intensity.maxCoeff(&peak_idx);
  if (peak <= 0.0) throw ConfigError("bandwidth of an all-zero spectrum");
  const double level = metric == BandwidthMetric::fwhm ? peak / 2.0 : peak / std::exp(1.0);

  // Main lobe: walk out from the peak to the first dip below `level`, then take
  // the outermost crossing of that contiguous super-level run.
  Eigen::Index lo = peak_idx;
  while (lo > 0 && s.intensity(lo - 1) >= level) --lo;
  Eigen::Index hi = peak_idx;
  while (hi + 1 < s.size() && s.intensity(hi + 1) >= level) ++hi;
  if (lo == 0 && s.intensity(0) >= level) throw ConfigError("no lower bandwidth crossing in axis range");
  if (hi == s.size() - 1 && s.intensity(hi) >= level) {
    throw ConfigError("no upper bandwidth crossing in axis range");
  }
  const double left = crossing(s, lo - 1, level);
  const double right = crossing(s, hi, level);
  const double width = right - left;
  return metric == BandwidthMetric::fwhm ? width : width / 2.0;
}

Spectrum axis_convert(const Spectrum& s, AxisKind to) {
  s.validate();
  if (s.axis_kind == to) return s;
  const bool from_wl = s.axis_kind == AxisKind::wavelength_nm && to == AxisKind::angular_frequency;
  const bool from_om = s.axis_kind == AxisKind::angular_frequency && to == AxisKind::wavelength_nm;
  if (!from_wl && !from_om) throw ConfigError("axis_convert supports wavelength <-> angular frequency");
  if ((s.axis.array() <= 0.0).any()) throw ConfigError("axis_convert requires positive axis values");

  Spectrum out = s;
  out.axis_kind = to;
  const Eigen::Index n = s.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index r = n - 1 - i;  // reciprocal map reverses order
    out.axis(i) = from_wl ? omega_from_nm(s.axis(r)) : nm_from_omega(s.axis(r));
    out.intensity(i) = s.intensity(r);
    if (s.amplitude) (*out.amplitude)(i) = (*s.amplitude)(r);
  }
  if (s.resolution_sigma > 0.0) {
    const double c = s.axis((n - 1) / 2);
    out.resolution_sigma = from_wl ? omega_from_nm(c) * s.resolution_sigma / c
                                   : nm_from_omega(c) * s.resolution_sigma / c;
  }
  return out;
}

double spectrum_mse(const Spectrum& sim, const Spectrum& meas) {
  if (sim.axis_kind != meas.axis_kind) throw ConfigError("spectrum_mse axis kind mismatch");
  const double lo = std::max(sim.axis(0), meas.axis(0));
  const double hi = std::min(sim.axis(sim.size() - 1), meas.axis(meas.size() - 1));
  if (!(hi > lo)) throw ConfigError("spectrum_mse: axes do not overlap");

  const Spectrum m = meas.peak_normalized();
  const Spectrum r = resample(sim.peak_normalized(), meas.axis);
  double acc = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (m.axis(i) < lo || m.axis(i) > hi) continue;
    const double d = r.intensity(i) - m.intensity(i);
    acc += d * d;
    ++count;
  }
  return acc / static_cast<double>(count);
}

void write_spectrum_csv(const Spectrum& s, const std::string& path) {
  s.validate();
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "' for writing");
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", s.resolution_sigma);
  f << "# axis=" << to_string(s.axis_kind)
    << " unit=" << (s.axis_kind == AxisKind::wavelength_nm ? "nm"
                    : s.axis_kind == AxisKind::angular_frequency ? "rad_per_s" : "arb")
    << " temperature_C=";
  char tbuf[64];
  std::snprintf(tbuf, sizeof(tbuf), "%.17g", s.temperature_c);
  f << tbuf << " resolution_sigma=" << buf << "\n";
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    char a[64], b[64];
    std::snprintf(a, sizeof(a), "%.17g", s.axis(i));
    std::snprintf(b, sizeof(b), "%.17g", s.intensity(i));
    f << a << "," << b << "\n";
  }
}

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open '" + path + "'");
  Spectrum s;
  std::string line;
  int lineno = 0;
  std::vector<double> xs, ys;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream hs(line.substr(1));
      std::string tok;
      while (hs >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        try {
          if (key == "axis") s.axis_kind = axis_kind_from_string(val);
          else if (key == "temperature_C") s.temperature_c = std::stod(val);
          else if (key == "resolution_sigma") s.resolution_sigma = std::stod(val);
        } catch (const std::invalid_argument&) {
          throw ParseError("bad header value '" + tok + "'", lineno);
        }
      }
      continue;
    }
    if (line.rfind("axis,", 0) == 0) continue;  // optional column-name row
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'axis,intensity'", lineno);
    // strtod instead of stod: subnormal intensities must parse, not throw.
    auto parse = [&](const std::string& field) {
      const char* begin = field.c_str();
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin || *end != '\0') {
        throw ParseError("malformed number in '" + line + "'", lineno);
      }
      return v;
    };
    xs.push_back(parse(line.substr(0, comma)));
    ys.push_back(parse(line.substr(comma + 1)));
  }
  if (xs.empty()) throw ParseError("no data rows in '" + path + "'");
  s.axis = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  s.intensity = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  s.validate();
  return s;
}

}  // namespace qpg
