#pragma once

#include <string>

#include "cuspidal/cusps.hpp"
#include "cuspidal/modform.hpp"
#include "cuspidal/petersson.hpp"

#include <json.hpp>

namespace cuspidal::io {

using nlohmann::json;

inline constexpr const char* kSchema = "cuspidal/1";

json character_to_json(const arith::DirichletCharacter& chi);
arith::DirichletCharacter character_from_json(const json& j);

// Form files carry either explicit coefficients or a generator spec
// ("eta": [[d, r], ...] or "level1": {"weight": m, "index": i} or
// "hecke_primes": {"p": [re, im], ...}).
json form_to_json(const modform::FormInput& f);
modform::FormInput form_from_json(const json& j, int n_max_default = 1000);

modform::FormInput load_form(const std::string& path, int n_max_default = 1000);

json expansion_to_json(const cusps::CuspExpansion& e);
json inner_product_to_json(const petersson::InnerProductReport& r);

std::vector<petersson::AdjointLocalFactor> adjoint_factors_from_json(const json& j);
std::vector<petersson::IchinoLocalFactor> ichino_factors_from_json(const json& j);

void write_json(const std::string& path, const json& j);
json read_json(const std::string& path);

}  // namespace cuspidal::io
