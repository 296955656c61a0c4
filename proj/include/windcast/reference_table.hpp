// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

namespace windcast {

struct ReferenceRmse {
  double train;
  double test;
};

/// Published train/test RMSE for the four stacked variants at the Starkville and
/// Meridian airports, January, July and October 2022. Site and month match
/// case-insensitively on their first word ("July" and "july 2022" both work);
/// model is a ModelConfig::label() such as "Stateless LSTM".
std::optional<ReferenceRmse> published_rmse(std::string_view site, std::string_view month,
                                            std::string_view model);

}  // namespace windcast
