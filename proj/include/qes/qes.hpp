#pragma once

#include <qes/algebra.hpp>
#include <qes/error.hpp>
#include <qes/expr.hpp>
#include <qes/linalg.hpp>
#include <qes/mapping.hpp>
#include <qes/mass_profile.hpp>
#include <qes/numeric.hpp>
#include <qes/oracle.hpp>
#include <qes/pipeline.hpp>
#include <qes/potentials.hpp>
