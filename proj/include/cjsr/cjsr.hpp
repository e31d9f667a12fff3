#pragma once

#include "cjsr/automaton.hpp"
#include "cjsr/errors.hpp"
#include "cjsr/io.hpp"
#include "cjsr/iteration.hpp"
#include "cjsr/lifting.hpp"
#include "cjsr/matrix.hpp"
#include "cjsr/monomials.hpp"
#include "cjsr/report.hpp"
#include "cjsr/sdp.hpp"
#include "cjsr/sos.hpp"
#include "cjsr/system.hpp"
