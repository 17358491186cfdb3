#include <algorithm>
#include <set>

#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"

namespace jjtune::fitkit {

namespace {

double interpolate(const std::vector<double>& x, const std::vector<double>& y, double at) {
  if (x.empty() || at < x.front() || at > x.back()) throw DomainError("t' outside the session's samples");
  const auto hi = std::lower_bound(x.begin(), x.end(), at);
  const auto i = static_cast<std::size_t>(hi - x.begin());
  if (*hi == at) return y[i];
  const double w = (at - x[i - 1]) / (x[i] - x[i - 1]);
  return y[i - 1] + w * (y[i] - y[i - 1]);
}

}  // namespace

RelaxationParameters relaxation_parameters(const std::vector<RelaxSession>& sessions,
                                           const std::vector<double>& tPrimes, bool fitLaws) {
  std::set<double> distinct;
  for (const auto& s : sessions) {
    if (s.tPrime.size() != s.dRtotal.size()) throw DomainError("session series differ in length");
    if (!std::is_sorted(s.tPrime.begin(), s.tPrime.end())) throw DomainError("session times must be sorted");
    distinct.insert(s.dRactive);
  }
  if (sessions.size() < 3 || distinct.size() < 3)
    throw DomainError("slope and offset need >= 3 sessions with distinct dRactive");

  RelaxationParameters out;
  std::vector<double> x(sessions.size()), y(sessions.size());
  for (double tp : tPrimes) {
    for (std::size_t i = 0; i < sessions.size(); ++i) {
      x[i] = sessions[i].dRactive;
      y[i] = interpolate(sessions[i].tPrime, sessions[i].dRtotal, tp);
    }
    const auto f = fit_linear(x, y);
    out.points.push_back({tp, f.value("slope"), f.param("slope").stdErr, f.value("offset"),
                          f.param("offset").stdErr});
  }
  if (fitLaws && out.points.size() >= 4) {
    std::vector<double> t, k, m;
    for (const auto& p : out.points) {
      t.push_back(p.tPrime);
      k.push_back(p.slope);
      m.push_back(p.offset);
    }
    out.slopeLaw = fit_log_growth(t, k, 1.0);
    out.offsetLaw = fit_log_growth(t, m, 0.0);
  }
  return out;
}

RelaxSeries relaxation_series(const ResistanceTrace& trace) {
  const auto& s = trace.samples;
  std::size_t stop = s.size();
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i].phase == PhaseLabel::Active || s[i].phase == PhaseLabel::Drop) stop = i;
  if (stop == s.size()) throw DomainError("trace has no manipulation sample to reference the relaxation to");
  RelaxSeries out;
  out.tStop = s[stop].t;
  out.Rstop = s[stop].R;
  for (std::size_t i = stop + 1; i < s.size(); ++i) {
    if (s[i].phase != PhaseLabel::Relax) continue;
    out.tPrime.push_back(s[i].t - out.tStop);
    out.y.push_back(s[i].R / out.Rstop);
  }
  if (out.tPrime.size() < 3) throw DomainError("fewer than three relaxation samples after the stop");
  return out;
}

}  // namespace jjtune::fitkit
