#pragma once

#include "json.hpp"

#include "coop2/coop.hpp"
#include "coop2/lyapunov.hpp"
#include "coop2/model.hpp"
#include "coop2/models.hpp"
#include "coop2/orbit.hpp"
#include "coop2/spectral.hpp"

namespace coop2::serialize {

// Insertion-ordered so that dumps are byte-stable.
using Json = nlohmann::ordered_json;

Json vector(const Vector& v);
/// Row lists.
Json matrix(const Matrix& m);
Json box(const Box& b);
Json model(const Model& m);
/// Eigenvalues as [re, im] pairs.
Json spectrum(const spectral::OrderedSpectrum& s);
Json equilibrium(const models::Equilibrium& e);
Json split(const spectral::SpectralSplit& s);
Json certificate(const coop::CoopCertificate& c);
Json orbit_report(const orbit::OrbitReport& r);
Json theorem2(const orbit::Theorem2Report& r);
Json lyapunov(const lyapunov::LyapunovCertificate& c);

}  // namespace coop2::serialize
