#pragma once

#include "certificate.hpp"
#include "certify.hpp"
#include "det.hpp"
#include "exact.hpp"
#include "expr.hpp"
#include "function.hpp"
#include "identities.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "module.hpp"
#include "module_algebra.hpp"
#include "sampling.hpp"
#include "surd.hpp"
#include "system.hpp"
