#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "stabkit/branches.h"
#include "stabkit/evolve.h"
#include "stabkit/spectra.h"

namespace stabkit {

/// Numbers are printed with %.17g so identical runs give identical bytes.
std::string FormatNumber(double x);

std::string SpectrumCsv(const EigenList& eig);           // re,im,residual
std::string ScanCsv(const ResolventScan& scan);          // beta,norm
std::string BranchCsv(const std::vector<BranchRow>& r);  // index,re,im,pred_re,pred_im,rel_err
std::string DecayCsv(const DecayReport& rep);            // t,E,residual

nlohmann::json DecaySummary(const DecayReport& rep);

/// Log-log polyline with axes and a title; non-positive points are skipped.
std::string LogLogSvg(const std::vector<double>& x, const std::vector<double>& y,
                      const std::string& title, const std::string& xlabel,
                      const std::string& ylabel);

/// Writes `content` to path, creating parent directories.
void WriteFile(const std::string& path, const std::string& content);

}  // namespace stabkit
