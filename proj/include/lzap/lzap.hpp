#pragma once

#include "codec.hpp"
#include "fingerprint.hpp"
#include "firstocc.hpp"
#include "io.hpp"
#include "oracle.hpp"
#include "parser.hpp"
#include "phrase.hpp"
#include "schedule.hpp"
