#ifndef MTENET_NIG_HPP
#define MTENET_NIG_HPP

namespace mtenet {

// alpha must exceed 1 by at least this margin at construction; the
// predictive moments divide by (alpha - 1).
inline constexpr double kAlphaMargin = 1e-12;

// Normal-Inverse-Gamma parameters emitted per input by the evidential head:
// gamma is the predicted mean (target units), nu and alpha are the pseudo
// observation counts backing the mean and the variance, beta is the scale
// (squared target units). Construction enforces nu > 0, alpha > 1, beta > 0.
struct EvidentialOutput {
  double gamma;
  double nu;
  double alpha;
  double beta;

  EvidentialOutput(double gamma_, double nu_, double alpha_, double beta_);
};

struct PredictiveSummary {
  double mean;       // E[mu]
  double aleatoric;  // E[sigma^2] = beta / (alpha - 1)
  double epistemic;  // Var[mu]    = aleatoric / nu
};

// Parameters of the student-t marginal. `scale` is the squared-scale
// parameter s = beta (1 + nu) / (nu alpha); the density standardizes the
// argument by sqrt(scale) and has dof = 2 alpha degrees of freedom.
struct StudentTParams {
  double location;
  double scale;
  double dof;
};

PredictiveSummary predictive_summary(const EvidentialOutput& m);

StudentTParams marginal_params(const EvidentialOutput& m);

// log density of the marginal at y. Agrees with -nll_loss(y, m) to 1e-10;
// the two are computed by independent routes.
double log_marginal_pdf(double y, const EvidentialOutput& m);

// P(Y <= y) under the marginal, via the regularized incomplete beta.
double marginal_cdf(double y, const EvidentialOutput& m);

// Inverse of marginal_cdf by bracketing bisection; p must lie in (0, 1).
double marginal_quantile(double p, const EvidentialOutput& m);

// Student-t primitives in the StudentTParams parameterization.
double student_t_log_pdf(const StudentTParams& t, double y);
double student_t_cdf(const StudentTParams& t, double y);
double student_t_quantile(const StudentTParams& t, double p);

// NIG parameters of scale*y + shift when m parameterizes y. Used to map
// outputs trained against z-scored targets back to raw target units.
EvidentialOutput affine_transformed(const EvidentialOutput& m, double scale,
                                    double shift);

}  // namespace mtenet

#endif  // MTENET_NIG_HPP
