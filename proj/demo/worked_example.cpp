// Amalgamates the expansion t -> (3/2) t of the line into a common
// 2-dimensional space and prints the certificate, then runs the full
// back-and-forth between two line chains seeded with the same map.

#include "polybanach/engine.hpp"

#include <iostream>

using namespace polybanach;

namespace {

PolyhedralSpace line() {
  HalfspaceSystem h(1);
  Vec one(1);
  one << 1;
  h.add(one, Rational(1));
  h.add(-one, Rational(1));
  return PolyhedralSpace::from_halfspaces(h);
}

ChainSpace line_chain(std::size_t stages) {
  std::vector<PolyhedralSpace> s(stages, line());
  std::vector<LinearMap> inc;
  for (std::size_t i = 0; i + 1 < stages; ++i) inc.push_back(identity_map(s[i]));
  return ChainSpace(std::move(s), std::move(inc));
}

}  // namespace

int main() {
  PolyhedralSpace L = line();
  Mat m(1, 1);
  m << Rational(3, 2);
  LinearMap f(L, L, m);

  std::cout << "defect of t -> (3/2) t : " << rational_to_string(f.defect().epsilon_star) << "\n";

  AmalgamCertificate cert = amalgamate(L, L, f, Rational(3, 5));
  std::cout << "amalgam at eps = 3/5:\n";
  std::cout << "  dim Z          = " << cert.Z.dimension() << "\n";
  std::cout << "  bound_achieved = " << rational_to_string(cert.bound_achieved) << "\n";
  std::cout << "  defect(i)      = " << rational_to_string(cert.defect_i.epsilon_star) << "\n";
  std::cout << "  defect(j)      = " << rational_to_string(cert.defect_j.epsilon_star) << "\n";

  ChainSpace E = line_chain(5), F = line_chain(5);
  EpsilonSchedule sched = schedule_make(Rational(3, 5), Rational(51, 100), Rational(1, 20), 4);
  BackAndForthTrace trace = back_and_forth(E, F, L, identity_map(L), f, sched);
  std::cout << "back-and-forth at depth " << sched.depth << ":\n";
  for (std::size_t n = 0; n < trace.steps.size(); ++n)
    std::cout << "  step " << n << ": drift " << rational_to_string(trace.steps[n].drift) << " <= "
              << rational_to_string(trace.steps[n].drift_limit) << "\n";
  std::cout << "  final distance = " << rational_to_string(trace.final_distance) << " < 3/5\n";
  return 0;
}
