#pragma once

#include <string_view>

// Text resources compiled in from data/ (see cmake/EmbedData.cmake).
namespace refgame::resources {

std::string_view stopwords_en();
std::string_view re_extraction_prompt();

std::string_view task_background();
std::string_view director_base();
std::string_view director_round_wrapper();
std::string_view director_round_start();
std::string_view director_communication_rules();
std::string_view director_schema();
std::string_view director_minimal_schema();
std::string_view matcher_base();
std::string_view matcher_round_wrapper();
std::string_view matcher_sequence_state();
std::string_view matcher_communication_rules();
std::string_view matcher_schema();
std::string_view matcher_minimal_schema();
std::string_view retry_notice();
std::string_view attention_check();

}  // namespace refgame::resources
