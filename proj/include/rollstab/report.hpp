// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "rollstab/decay.hpp"
#include "rollstab/initial.hpp"
#include "rollstab/semigroup.hpp"
#include "rollstab/symbol.hpp"

namespace rollstab {

using Json = nlohmann::json;

Json to_json(const RollParams& p);
Json to_json(const Grid& g);
Json to_json(const Lambda1& l);
Json to_json(const StabilityReport& r);   // summary, without the per-k coefficient table
Json to_json(const EstimateCertificate& c);
Json to_json(const RateFit& f);
Json to_json(const ExpFit& f);
Json to_json(const TemplateValue& v);
Json to_json(const OracleReport& r);
Json to_json(const ToyReport& r);          // fits and verdicts, not the series
Json to_json(const InitialData& d);        // norms and generator settings
Json to_json(const SimulationOptions& o);

// Round-trip-exact decimal text.
std::string format_number(double v);

void write_text(const std::string& path, const std::string& text);
void write_json(const std::string& path, const Json& j);
// k,re_lc_p,im_lc_p,re_lc_m,im_lc_m,re_ls,im_ls
void write_curves_csv(const std::string& path, const SpectralData& d);
// z,t,component,i,j,value with component "c" or "e"; every stride-th sample
// with |z| <= z_max.
void write_kernel_csv(const std::string& path, const KernelTable& table, double z_max, std::size_t stride);
// t,norm_id,value
void write_norms_csv(const std::string& path, const std::vector<NormRecord>& log);
// t,value
void write_series_csv(const std::string& path, const std::vector<double>& t, const std::vector<double>& v);
// x,value
void write_field_csv(const std::string& path, const Grid& g, const std::vector<double>& f);

}  // namespace rollstab
