#pragma once

#include <string>

#include "rbgf/semigroup.hpp"

namespace rbgf {

/// One eta sample of the low-frequency fluid symbol: the five branch values
/// and the eigen/shear-correction vectors needed to evaluate any moment of
/// the four wave parts with the time dependence kept analytic.
struct FluidSample {
    double eta = 0;
    cplx beta_m1, beta_0, beta_p1, beta_2;
    CVec e_m1, e_0, e_p1;  // m=0 eigenfunctions, bilinear-normalized
    CVec e2;               // m=1 eigenfunction
    CVec estar_m1, estar_p1;  // psi* vectors of the acoustic pair (m=0 sector)
};

enum class WavePart { all, acoustic, entropy, shear, star_diff };
// all        : full five-branch fluid symbol G_{L,0}
// acoustic   : G^1 (cos/sin pair of the +-1 branches, psi* removed)
// entropy    : G^2 (branch 0)
// shear      : G^3 (branch 2 projectors plus the psi* pair at e^{beta_2 t})
// star_diff  : G^4 (the (e^{beta_j t} - e^{beta_2 t}) psi* difference)

/// The 5x5 moment matrices of the amplitude operators in the F basis
/// (order F_{-1}, F_0, F_1, F_2, F_3).
struct AmplitudeMatrices {
    Eigen::Matrix<cplx, 5, 5> B1, B2, B3, B4;
    Eigen::Matrix<cplx, 5, 5> B5_11, B6_11;  // xi_i xi_j / |xi|^2 contraction at xi = eta e1
};

class FluidAmplitudes {
  public:
    FluidAmplitudes(const Spectral* sp, double eta_max, int n_samples);

    double eta_max() const { return eta_max_; }
    const std::vector<FluidSample>& samples() const { return samples_; }
    const Spectral& spectral() const { return *sp_; }

    /// Bilinear moment q_out^T G-part(t, eta) q_in for m=0 probes, with the
    /// amplitude data interpolated between samples (cubic).
    cplx symbol_moment(WavePart part, const CVec& q_out, const CVec& q_in, double t,
                       double eta) const;

    AmplitudeMatrices amplitude_matrices(int sample_index) const;

    /// Full m=0 sector matrix of the selected part at a sample (testing aid).
    CMat sector_matrix(WavePart part, int sample_index, double t) const;

  private:
    const Spectral* sp_;
    double eta_max_;
    std::vector<FluidSample> samples_;
};

/// Kirchhoff spherical means of a radial function g: w*g and w_t*g where
/// w-hat = sin(c|xi|t)/(c|xi|). The time derivative has the closed boundary
/// form and needs no derivative of g.
double kirchhoff_convolve(const std::function<double(double)>& g_radial, double t, double c,
                          double xmag);
double kirchhoff_convolve_dt(const std::function<double(double)>& g_radial, double t, double c,
                             double xmag);

/// The double-derivative spherical-mean wave int_0^t (s/4pi) oint t^{-3/2}
/// e^{-|x+csy|^2/(D1 t)} dS_y ds through the closed Gaussian-tail reduction.
struct RieszWave {
    double t, c, D1;
    double value(double xmag) const;         // the undifferentiated integral
    double d2_11(double xmag) const;         // d^2/dx_1^2 at x = |x| e_1
    double oracle_value(double xmag) const;  // direct 2-D (s, theta) quadrature
};

struct FieldPoint {
    double t, x, value;
};

struct WaveComponent {
    std::string label;
    std::vector<FieldPoint> points;
};

/// Radial inverse Fourier transform of the moment symbol of one wave part
/// over the low-frequency ball, against radial Gaussian initial data
/// f0(x) = exp(-|x|^2/(2 sigma^2)).
WaveComponent synthesize_moment_field(const FluidAmplitudes& fa, WavePart part,
                                      const CVec& q_out, const CVec& q_in, double sigma_x,
                                      const std::vector<double>& ts,
                                      const std::vector<double>& xs,
                                      const std::string& label);

/// Theorem-style envelope: (1+t)^{-p}(e^{-x^2/(D(1+t))} + (1+t)^{-1/2}
/// e^{-(x-ct)^2/(D(1+t))}) + e^{-(x+t)/D} + cone (1+t)^{-p} B_{3/2}(t,x) 1_{x<=ct}.
struct EnvelopeFamily {
    double p = 1.5;
    double c = 0.0;
    bool cone = false;
    double evaluate(double t, double x, double D) const;
};

struct EnvelopeFit {
    double C_fit = 0, D_fit = 0;
    bool finite = true;
    std::vector<double> C_of_D;
    std::vector<double> D_grid;
    int tight_count = 0;  // samples within 0.9 C_fit of the envelope
};

EnvelopeFit envelope_fit(const WaveComponent& wc, const EnvelopeFamily& fam,
                         const std::vector<double>& D_grid);

}  // namespace rbgf
