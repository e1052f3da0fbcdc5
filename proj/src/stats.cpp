#include "mobsim/stats.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mobsim/numfmt.hpp"

namespace mobsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Continued fraction for the incomplete beta, evaluated by the modified
/// Lentz method. Converges for x < (a+1)/(a+b+2); the caller flips to the
/// complementary form otherwise.
double betacf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 3e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;

    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;

    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

void check_table(const WithinSubjectsTable& table) {
    if (table.n < 2 || table.a < 1 || table.b < 1)
        throw std::invalid_argument("within-subjects table needs n >= 2 and a, b >= 1");
    if (table.values.size() != static_cast<std::size_t>(table.n) * table.a * table.b)
        throw std::invalid_argument("within-subjects table has wrong cell count");
}

double degeneracy_tol(double scale) { return 1e-10 * (1.0 + scale); }

void finish_effect(EffectStats& effect, double ss_total) {
    const double tol = degeneracy_tol(ss_total);
    if (effect.error_ss <= tol) {
        effect.degenerate = true;
        if (effect.ss > tol) {
            effect.f = kInf;
            effect.p = 0.0;
        } else {
            effect.f = 0.0;
            effect.p = 1.0;
        }
        return;
    }
    const double ms = effect.ss / effect.df;
    const double error_ms = effect.error_ss / effect.error_df;
    effect.f = ms / error_ms;
    effect.p = 1.0 - f_cdf(effect.f, effect.df, effect.error_df);
}

}  // namespace

AnovaResult rm_anova_2way(const WithinSubjectsTable& table) {
    check_table(table);
    const int n = table.n, a = table.a, b = table.b;

    double grand = 0.0;
    for (double v : table.values) grand += v;
    grand /= table.values.size();

    std::vector<double> mean_a(a, 0.0), mean_b(b, 0.0), mean_s(n, 0.0);
    std::vector<double> mean_ab(static_cast<std::size_t>(a) * b, 0.0);
    std::vector<double> mean_sa(static_cast<std::size_t>(n) * a, 0.0);
    std::vector<double> mean_sb(static_cast<std::size_t>(n) * b, 0.0);
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < b; ++j) {
                const double v = table.at(s, i, j);
                mean_a[i] += v;
                mean_b[j] += v;
                mean_s[s] += v;
                mean_ab[i * b + j] += v;
                mean_sa[s * a + i] += v;
                mean_sb[s * b + j] += v;
            }
    for (double& v : mean_a) v /= n * b;
    for (double& v : mean_b) v /= n * a;
    for (double& v : mean_s) v /= a * b;
    for (double& v : mean_ab) v /= n;
    for (double& v : mean_sa) v /= b;
    for (double& v : mean_sb) v /= a;

    AnovaResult result;
    result.has_b = b > 1;

    for (double v : table.values) result.ss_total += (v - grand) * (v - grand);
    for (int s = 0; s < n; ++s)
        result.ss_subjects += a * b * (mean_s[s] - grand) * (mean_s[s] - grand);

    EffectStats& A = result.effect_a;
    A.name = "A";
    A.df = a - 1;
    A.error_df = (a - 1) * (n - 1);
    for (int i = 0; i < a; ++i) A.ss += n * b * (mean_a[i] - grand) * (mean_a[i] - grand);
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < a; ++i) {
            const double dev = mean_sa[s * a + i] - mean_a[i] - mean_s[s] + grand;
            A.error_ss += b * dev * dev;
        }
    finish_effect(A, result.ss_total);

    if (!result.has_b) return result;

    EffectStats& B = result.effect_b;
    B.name = "B";
    B.df = b - 1;
    B.error_df = (b - 1) * (n - 1);
    for (int j = 0; j < b; ++j) B.ss += n * a * (mean_b[j] - grand) * (mean_b[j] - grand);
    for (int s = 0; s < n; ++s)
        for (int j = 0; j < b; ++j) {
            const double dev = mean_sb[s * b + j] - mean_b[j] - mean_s[s] + grand;
            B.error_ss += a * dev * dev;
        }
    finish_effect(B, result.ss_total);

    EffectStats& AB = result.interaction;
    AB.name = "AxB";
    AB.df = (a - 1) * (b - 1);
    AB.error_df = (a - 1) * (b - 1) * (n - 1);
    for (int i = 0; i < a; ++i)
        for (int j = 0; j < b; ++j) {
            const double dev = mean_ab[i * b + j] - mean_a[i] - mean_b[j] + grand;
            AB.ss += n * dev * dev;
        }
    for (int s = 0; s < n; ++s)
        for (int i = 0; i < a; ++i)
            for (int j = 0; j < b; ++j) {
                const double dev = table.at(s, i, j) - mean_ab[i * b + j] -
                                   mean_sa[s * a + i] - mean_sb[s * b + j] + mean_a[i] +
                                   mean_b[j] + mean_s[s] - grand;
                AB.error_ss += dev * dev;
            }
    finish_effect(AB, result.ss_total);

    return result;
}

ContrastResult planned_contrast(const WithinSubjectsTable& table, Factor factor,
                                std::span<const double> weights) {
    check_table(table);
    const int n = table.n;
    const int levels = factor == Factor::A ? table.a : table.b;
    if (static_cast<int>(weights.size()) != levels)
        throw std::invalid_argument("contrast weight count must match factor levels");
    double wsum = 0.0, wsq = 0.0;
    for (double w : weights) {
        wsum += w;
        wsq += w * w;
    }
    if (std::abs(wsum) > 1e-12 || wsq == 0.0)
        throw std::invalid_argument("contrast weights must sum to 0 and not all be 0");

    // Per subject: weighted combination of that subject's level means,
    // collapsed over the other factor.
    std::vector<double> combos(n, 0.0);
    for (int s = 0; s < n; ++s) {
        double combo = 0.0;
        for (int l = 0; l < levels; ++l) {
            double level_mean = 0.0;
            if (factor == Factor::A) {
                for (int j = 0; j < table.b; ++j) level_mean += table.at(s, l, j);
                level_mean /= table.b;
            } else {
                for (int i = 0; i < table.a; ++i) level_mean += table.at(s, i, l);
                level_mean /= table.a;
            }
            combo += weights[l] * level_mean;
        }
        combos[s] = combo;
    }

    double mean = 0.0;
    for (double c : combos) mean += c;
    mean /= n;
    double dev_ss = 0.0;
    for (double c : combos) dev_ss += (c - mean) * (c - mean);

    ContrastResult result;
    result.weights.assign(weights.begin(), weights.end());
    result.df2 = n - 1;
    // Normalizing by the weight norm makes ss comparable across weight
    // scalings; F is unchanged by it.
    result.ss = n * mean * mean / wsq;
    result.error_ss = dev_ss / wsq;

    const double tol = degeneracy_tol(result.ss);
    if (result.error_ss <= tol) {
        result.degenerate = true;
        result.f = result.ss > tol ? kInf : 0.0;
        result.p = result.ss > tol ? 0.0 : 1.0;
    } else {
        result.f = result.ss / (result.error_ss / result.df2);
        result.p = 1.0 - f_cdf(result.f, 1, result.df2);
    }
    result.p_bonferroni = result.p;
    return result;
}

double incomplete_beta_reg(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta_reg: a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double front = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                                  a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
    if (!(d1 > 0.0) || !(d2 > 0.0)) throw std::invalid_argument("f_cdf: d1, d2 > 0");
    if (x <= 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    return incomplete_beta_reg(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

double bonferroni(double p, int m) {
    if (m < 1 || p < 0.0 || p > 1.0) throw std::invalid_argument("bonferroni: need m >= 1, p in [0,1]");
    return std::min(1.0, m * p);
}

AnovaRow to_row(const EffectStats& effect) {
    return {effect.name, effect.ss,       effect.df, effect.error_ss,
            effect.error_df, effect.f, effect.p,  effect.p};
}

AnovaRow to_row(const ContrastResult& contrast) {
    return {contrast.name, contrast.ss,       contrast.df1, contrast.error_ss,
            contrast.df2,  contrast.f, contrast.p,   contrast.p_bonferroni};
}

void write_anova_csv(std::ostream& out, std::span<const AnovaRow> rows) {
    out << "effect,ss,df,error_ss,error_df,f,p,p_bonferroni\n";
    for (const AnovaRow& row : rows)
        out << row.effect << ',' << format_shortest(row.ss) << ',' << row.df << ','
            << format_shortest(row.error_ss) << ',' << row.error_df << ','
            << format_shortest(row.f) << ',' << format_shortest(row.p) << ','
            << format_shortest(row.p_bonferroni) << '\n';
}

namespace {

std::string p_str(double p) {
    if (p < 0.001) return "p < .001";
    std::string fixed = format_fixed(p, 3);
    if (fixed.size() > 1 && fixed[0] == '0') fixed.erase(0, 1);  // ".042" house style
    return "p = " + fixed;
}

std::string f_line(const std::string& label, int df1, int df2, double f, double p) {
    std::ostringstream out;
    out << label << ": F(" << df1 << ", " << df2 << ") = "
        << (std::isinf(f) ? "inf" : format_fixed(f, 2)) << ", " << p_str(p);
    return out.str();
}

std::string level_label(const std::vector<std::string>& labels, int index,
                        const char* prefix) {
    if (index < static_cast<int>(labels.size())) return labels[index];
    return std::string(prefix) + std::to_string(index + 1);
}

}  // namespace

std::string format_anova_report(const WithinSubjectsTable& table,
                                const AnovaResult& anova,
                                std::span<const ContrastResult> contrasts,
                                const std::string& response_name) {
    std::ostringstream out;
    out << "response: " << response_name << "\n";
    out << "subjects: " << table.n << " worlds, " << table.a << "x" << table.b
        << " conditions each\n\n";

    out << "cell means (rows: " << (anova.effect_a.name.empty() ? "A" : anova.effect_a.name);
    out << ", columns: " << (anova.has_b ? anova.effect_b.name : std::string("-")) << ")\n";
    for (int i = 0; i < table.a; ++i) {
        out << "  " << level_label(table.a_labels, i, "a");
        for (int j = 0; j < table.b; ++j) {
            double mean = 0.0;
            for (int s = 0; s < table.n; ++s) mean += table.at(s, i, j);
            mean /= table.n;
            out << "  " << level_label(table.b_labels, j, "b") << "="
                << format_fixed(mean, 2);
        }
        out << "\n";
    }
    out << "\n";

    const EffectStats& A = anova.effect_a;
    out << f_line(A.name, A.df, A.error_df, A.f, A.p)
        << (A.degenerate ? "  [degenerate error term]" : "") << "\n";
    if (anova.has_b) {
        const EffectStats& B = anova.effect_b;
        const EffectStats& AB = anova.interaction;
        out << f_line(B.name, B.df, B.error_df, B.f, B.p)
            << (B.degenerate ? "  [degenerate error term]" : "") << "\n";
        out << f_line(AB.name, AB.df, AB.error_df, AB.f, AB.p)
            << (AB.degenerate ? "  [degenerate error term]" : "") << "\n";
    }

    if (!contrasts.empty()) {
        out << "\nplanned contrasts (Bonferroni, m=" << contrasts.size() << "):\n";
        for (const ContrastResult& c : contrasts) {
            out << "  " << f_line(c.name, c.df1, c.df2, c.f, c.p) << " (corrected "
                << p_str(c.p_bonferroni) << ")"
                << (c.degenerate ? "  [degenerate error term]" : "") << "\n";
        }
    }
    return out.str();
}

}  // namespace mobsim
