#pragma once

#include "sdkex/attack.hpp"
#include "sdkex/bigint.hpp"
#include "sdkex/config.hpp"
#include "sdkex/core.hpp"
#include "sdkex/errors.hpp"
#include "sdkex/groupring.hpp"
#include "sdkex/kdf.hpp"
#include "sdkex/modp.hpp"
#include "sdkex/nilpotent.hpp"
#include "sdkex/permgroup.hpp"
#include "sdkex/session.hpp"
#include "sdkex/wire.hpp"
