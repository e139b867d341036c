// Periodic points of the golden example accumulating on the baseline.
//
// Starts from the fixed point of the first-return map inside E^{-1}(S_2),
// builds the sequence z_n = Phi^(2n-2) z and prints, for each n, the return
// time of its atom and how far an orbit prefix strays from [-1, Phi].

#include <iostream>

#include "tce/tce.hpp"

int main(int argc, char** argv) {
  const unsigned bits = 256;
  const std::uint64_t count = argc > 1 ? std::stoull(argv[1]) : 8;
  const std::uint64_t horizon = argc > 2 ? std::stoull(argv[2]) : 2000;
  tce::PrecisionScope scope(bits);
  const tce::TceParams k = tce::golden_example(bits);
  const auto z = tce::return_fixed_point(k, {2, 0});
  if (!z) {
    std::cerr << "no fixed point found in S_2\n";
    return 1;
  }
  const tce::Cascade cascade = tce::periodic_cascade(k, *z, 2, count);
  std::cout << "period under R: " << cascade.period << "\n";
  std::cout << "n,atom_m,h,in_atom,abs_z,max_shadow_error,max_outside_segment,max_height\n";
  for (const auto& e : cascade.entries) {
    const tce::ShadowStats st = tce::shadow_stats(k, e.z, horizon);
    std::cout << e.n << ',' << e.atom.m << ',' << e.h << ',' << (e.in_atom ? "yes" : "no") << ','
              << tce::format_real(tce::abs(e.z), 64) << ',' << tce::format_real(st.max_shadow_error, 64) << ','
              << tce::format_real(st.max_outside_segment, 64) << ',' << tce::format_real(st.max_height, 64) << '\n';
  }
}
