#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "coordsketch/combine.hpp"
#include "coordsketch/poisson_fwd.hpp"
#include "coordsketch/sketch.hpp"
#include "coordsketch/types.hpp"

namespace coordsketch {

// Line-oriented text formats, whitespace separated, `#` starts a comment.
//
// Collection:   key <id> <weight> [name=value ...]
//               set <set_id> <id> <id> ...
// Sketch:       sketch <set_id> <k> <threshold:hex-float>
//               entry <id> <rank:hex-float> <weight> [name=value ...]
// Combination:  combination <UNION|SCS|LCS> <k> <threshold:hex-float>
//               source <set_id> ...
//               entry ... / tau <id> <rank:hex-float> / member <id> <set_id> <IN|OUT|UNKNOWN>
// Poisson:      poisson <set_id> <tau:hex-float>
//               entry <id> <rank:hex-float> <weight>
//
// Ranks and thresholds round-trip bit-exactly through the hex-float form.

void write_collection(std::ostream& out, const WeightedSetCollection& collection);
WeightedSetCollection read_collection(std::istream& in);

void write_sketch(std::ostream& out, const BottomKSketch& sketch);
void write_sketches(std::ostream& out, const std::map<SetId, BottomKSketch>& sketches);
// The text format does not carry the rank family; the caller supplies it.
std::map<SetId, BottomKSketch> read_sketches(std::istream& in, RankFamily family);

void write_combination(std::ostream& out, const Combination& combination);

void write_poisson(std::ostream& out, const PoissonSample& sample);
std::map<SetId, PoissonSample> read_poisson(std::istream& in, RankFamily family);

// Formatting helpers shared by the CSV writer.
std::string format_hex(double value);
double parse_double(const std::string& token);  // accepts hex floats and inf

}  // namespace coordsketch
