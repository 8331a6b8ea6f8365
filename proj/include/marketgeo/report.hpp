#pragma once

#include <string>

#include "marketgeo/pipeline.hpp"
#include "marketgeo/surrogates.hpp"

namespace marketgeo {

// window_end_date,b2p,t2,g,flagged with numbers at round-trip precision;
// gaps written as nan with flag 0.
void write_gseries_csv(const KurtosisSeries& series, const std::string& path);

// rank,actual_eigenvalue,threshold_eigenvalue for every rank, 1-based.
void write_spectrum_csv(const EffectiveDimensionResult& result, const std::string& path);

} // namespace marketgeo
