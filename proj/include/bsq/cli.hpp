// Command-line front end of bs_spectra.
//
//   bs_spectra spectrum --k 50 [--k-list 50,100] [--symbol FILE] [--out DIR]
//   bs_spectra verify   --k 50 [--e-cap E] [--resolution N] [--grid-size N] [--count-at E,...]
//   bs_spectra eigfun   [--k 100] [--energy E | --at q,p] [--resolution N] [--delta D]
//   bs_spectra sweep    [--k-list 50,100,200,400] [--j-max 9] [--mode near-min|profile]
//   bs_spectra contour  [--resolution N]
//   bs_spectra operator --k 5
//   bs_spectra profile  [--e-cap E] [--resolution N] [--grid-size N]
//
// Without --out the primary CSV goes to standard output. Exit codes: 0
// success, 1 contract or tolerance failure, 2 usage or I/O error.

#pragma once

#include <iosfwd>

namespace bsq::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bsq::cli
