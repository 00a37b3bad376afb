#pragma once

#include "grandamalgam/amalgam.hpp"
#include "grandamalgam/closed_form.hpp"
#include "grandamalgam/config.hpp"
#include "grandamalgam/corpus.hpp"
#include "grandamalgam/error.hpp"
#include "grandamalgam/expr.hpp"
#include "grandamalgam/expr_json.hpp"
#include "grandamalgam/extremize.hpp"
#include "grandamalgam/grand_norm.hpp"
#include "grandamalgam/interval.hpp"
#include "grandamalgam/log.hpp"
#include "grandamalgam/outcome.hpp"
#include "grandamalgam/parallel.hpp"
#include "grandamalgam/quadrature.hpp"
#include "grandamalgam/report.hpp"
#include "grandamalgam/small_dual.hpp"
#include "grandamalgam/verify.hpp"
