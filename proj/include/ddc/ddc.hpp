#pragma once
// Convenience include for the whole library.

#include "ddc/bounds.hpp"
#include "ddc/coding.hpp"
#include "ddc/constructions.hpp"
#include "ddc/errors.hpp"
#include "ddc/json_io.hpp"
#include "ddc/linalg.hpp"
#include "ddc/search.hpp"
#include "ddc/version.hpp"
