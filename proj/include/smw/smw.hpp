#pragma once

#include "smw/corpus.hpp"
#include "smw/description_number.hpp"
#include "smw/errors.hpp"
#include "smw/halt_oracle.hpp"
#include "smw/logic.hpp"
#include "smw/sd_codec.hpp"
#include "smw/supermachine.hpp"
#include "smw/tm_sim.hpp"
