#pragma once

#include "carathset/core.hpp"
#include "carathset/random.hpp"
#include "carathset/discgeom.hpp"
#include "carathset/varieties.hpp"
#include "carathset/geodesics.hpp"
#include "carathset/metrics.hpp"
#include "carathset/ball.hpp"
#include "carathset/oracle.hpp"
