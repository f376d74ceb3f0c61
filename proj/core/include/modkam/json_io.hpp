#pragma once

#include "modkam/diophantine.hpp"
#include "modkam/hamiltonian.hpp"
#include "modkam/jackson.hpp"
#include "modkam/kam.hpp"
#include "modkam/modulus.hpp"
#include "modkam/regularity.hpp"

#include <json.hpp>

#include <string>

namespace modkam {

using json = nlohmann::json;

// field access with a schema message naming the path
double get_number(const json& j, const std::string& key, const std::string& where);
double get_number(const json& j, const std::string& key, const std::string& where, double fallback);
int get_int(const json& j, const std::string& key, const std::string& where);
int get_int(const json& j, const std::string& key, const std::string& where, int fallback);
std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where);

ModulusSpec modulus_from_json(const json& j, const std::string& where = "modulus");
HamiltonianModel model_from_json(const json& j, const std::string& where = "model");
KamConfig kam_config_from_json(const json& j);

void to_json(json& j, const ModulusSpec& m);
void to_json(json& j, const PropertyReport& r);
void to_json(json& j, const IntegralVerdict& v);
void to_json(json& j, const RegularityReport& r);
void to_json(json& j, const DioResult& r);
void to_json(json& j, const Frequency& f);
void to_json(json& j, const SmoothErrorReport& r);
void to_json(json& j, const HypothesisReport& r);
void to_json(json& j, const StepRecord& r);
void to_json(json& j, const TorusMap& t);
void to_json(json& j, const TorusFunction& f);

// %.17g, "nan"/"inf" spelled out
std::string format_double(double x);
std::string trace_csv(const IterationTrace& trace);

} // namespace modkam
