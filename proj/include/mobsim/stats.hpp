#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mobsim {

/// Complete n-subject table of a response over an a×b factorial, every
/// subject measured in every cell. Values are laid out subject-major:
/// value(s, i, j) sits at (s*a + i)*b + j.
struct WithinSubjectsTable {
    int n = 0;  // subjects
    int a = 0;  // factor A levels
    int b = 0;  // factor B levels
    std::vector<double> values;
    std::vector<std::string> a_labels;  // optional, for reports
    std::vector<std::string> b_labels;

    double at(int s, int i, int j) const { return values[(s * a + i) * b + j]; }
    double& at(int s, int i, int j) { return values[(s * a + i) * b + j]; }
};

struct EffectStats {
    std::string name;
    double ss = 0.0;
    int df = 0;
    double error_ss = 0.0;
    int error_df = 0;
    double f = 0.0;
    double p = 1.0;
    bool degenerate = false;  // error mean square vanished
};

struct AnovaResult {
    bool has_b = false;  // false when the table collapses to one factor (b=1)
    EffectStats effect_a;
    EffectStats effect_b;
    EffectStats interaction;
    double ss_subjects = 0.0;
    double ss_total = 0.0;
};

/// Two-way within-subjects decomposition; each effect is tested against its
/// own effect-by-subject interaction. A table with b = 1 degrades to the
/// one-way within-subjects ANOVA on factor A.
AnovaResult rm_anova_2way(const WithinSubjectsTable& table);

enum class Factor { A, B };

struct ContrastResult {
    std::string name;
    std::vector<double> weights;
    double ss = 0.0;
    double error_ss = 0.0;
    int df1 = 1;
    int df2 = 0;
    double f = 0.0;
    double p = 1.0;
    double p_bonferroni = 1.0;
    bool degenerate = false;
};

// Weighted comparison of one factor's level means, averaged over the other
// factor within each subject, tested with F(1, n-1). Weights must sum to 0
// and match the factor's level count.
ContrastResult planned_contrast(const WithinSubjectsTable& table, Factor factor,
                                std::span<const double> weights);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation,
/// absolute error <= 1e-10 over the tested domain.
double incomplete_beta_reg(double a, double b, double x);

/// F-distribution CDF with d1, d2 degrees of freedom.
double f_cdf(double x, double d1, double d2);

/// Family-wise correction for m planned comparisons: min(1, m*p).
double bonferroni(double p, int m);

/// One output row of the analysis table (omnibus effect or contrast).
struct AnovaRow {
    std::string effect;
    double ss = 0.0;
    int df = 0;
    double error_ss = 0.0;
    int error_df = 0;
    double f = 0.0;
    double p = 1.0;
    double p_bonferroni = 1.0;
};

AnovaRow to_row(const EffectStats& effect);
AnovaRow to_row(const ContrastResult& contrast);

void write_anova_csv(std::ostream& out, std::span<const AnovaRow> rows);

/// Report in conventional journal style: "F(2, 18) = 84.21, p < .001".
std::string format_anova_report(const WithinSubjectsTable& table,
                                const AnovaResult& anova,
                                std::span<const ContrastResult> contrasts,
                                const std::string& response_name);

}  // namespace mobsim
