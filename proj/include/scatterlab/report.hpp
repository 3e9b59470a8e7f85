// Canonical JSON views of the domain objects.  Reports are deterministic for
// a given configuration; anything timing-related is kept out of these
// converters and quarantined at the envelope level.

#pragma once

#include <json.hpp>

#include "scatterlab/equiv.hpp"

namespace scatterlab {

using Json = nlohmann::ordered_json;

Json ctx_to_json(const FieldCtx& ctx);
Json linpoly_to_json(const LinPoly& f);
Json linear_set_to_json(const LinearSet& set);
Json witness_to_json(const FieldCtx& ctx, const EquivWitness& w);
Json idealizer_to_json(const FieldCtx& ctx, const IdealizerReport& rep);
Json orbit_to_json(const FieldCtx& ctx, const OrbitReport& rep);
Json aut_to_json(const AutReport& rep);

}  // namespace scatterlab
