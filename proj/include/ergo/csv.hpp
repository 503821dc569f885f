#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ergo/processes.hpp"

namespace ergo::csv {

/// 17 significant digits (round-trips a double); "nan"/"inf"/"-inf" otherwise.
std::string format_number(double value);

struct Column
{
    std::string name;
    std::vector<double> values;
};

/// Header row plus one row per index; all columns must share a length.
void write_columns(std::ostream& out, const std::vector<Column>& columns);

/// `time,inst_0,...,inst_{n-1}` with one row per grid point.
void write_ensemble(std::ostream& out, const Ensemble& ensemble);

/// Parses the write_ensemble layout back into an Ensemble (no spec attached).
/// Throws SchemaError on any deviation.
Ensemble read_ensemble(std::istream& in);

} // namespace ergo::csv
