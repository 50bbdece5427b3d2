#pragma once

#include "lcs/integer.hpp"
#include "lcs/errors.hpp"
#include "lcs/intlinalg.hpp"
#include "lcs/pcgroup.hpp"
#include "lcs/builder.hpp"
#include "lcs/subgroup.hpp"
#include "lcs/homomorphism.hpp"
#include "lcs/series.hpp"
#include "lcs/freenil.hpp"
#include "lcs/report.hpp"
#include "lcs/extension.hpp"
#include "lcs/gradedlie.hpp"
#include "lcs/document.hpp"
#include "lcs/commands.hpp"
