#pragma once

// Phrasing bank for synthesized instructions: eight expressions per
// constraint type. Slots: {n} {relation} {keyword} {letter} {phrase}
// {language} {options}.

#include <array>
#include <string_view>

#include "dvr/constraint.hpp"

namespace dvr {

struct PhrasingTemplate {
  ConstraintType type;
  std::string_view text;
};

inline constexpr std::size_t kPhrasingsPerType = 8;

using PhrasingBank = std::array<std::array<std::string_view, kPhrasingsPerType>, kFormatTypeCount>;

// Indexed by ConstraintType (format types only).
inline const PhrasingBank& phrasing_bank() {
  static const PhrasingBank bank{{
      // postscript
      {"At the end of your response, please explicitly add a postscript starting with P.S.",
       "Please explicitly add a note starting with P.S.",
       "End your response with a postscript that begins with P.S.",
       "Include a postscript at the end of your answer, starting with P.S.",
       "Your reply must contain a postscript marked with P.S.",
       "Add a postscript starting with P.S. after the main text.",
       "Remember to close with a postscript introduced by P.S.",
       "Before you finish, append a short postscript that starts with P.S."},
      // placeholder
      {"Make sure it contains {relation} {n} placeholders represented by square brackets, such as [name].",
       "Your answer must have {relation} {n} placeholders, wrapped in square brackets, such as [author].",
       "Make sure to include {relation} {n} placeholders represented by square brackets, such as [address], [name].",
       "Use square brackets for placeholders, like [username1], [username2]. Please include {relation} {n} placeholders.",
       "The response must contain {relation} {n} placeholders in square brackets, e.g. [location].",
       "Include {relation} {n} placeholders written inside square brackets, such as [date].",
       "Add {relation} {n} fill-in placeholders enclosed in square brackets, for example [company].",
       "There should be {relation} {n} placeholders like [name] in your answer."},
      // include_keyword
      {"Make sure to include the words '{keyword}'.",
       "Don't forget to include the keywords {keyword}.",
       "Make sure to include the word '{keyword}'.",
       "Include the keyword \"{keyword}\" in your response.",
       "Your answer must mention \"{keyword}\".",
       "The word \"{keyword}\" should appear in your response.",
       "Be sure to use the keyword {keyword} somewhere in the text.",
       "Please include the keyword '{keyword}' in the response."},
      // exclude_keyword
      {"The word \"{keyword}\" should not appear in your response.",
       "The word '{keyword}' should not appear in your response.",
       "Do not include the word \"{keyword}\" in your response.",
       "Avoid using the keyword {keyword} anywhere in your answer.",
       "Your response must not contain the word '{keyword}'.",
       "Never mention \"{keyword}\" in the text.",
       "Make sure the word {keyword} is not used.",
       "Refrain from using the word \"{keyword}\"."},
      // letter_frequency
      {"Be sure the letter '{letter}' appears {relation} {n} times in your response.",
       "In your entire response, the letter {letter} should appear {relation} {n} times.",
       "Make sure the letter '{letter}' occurs {relation} {n} times.",
       "The letter {letter} must appear {relation} {n} times in your answer.",
       "Use the letter '{letter}' {relation} {n} times.",
       "Your response should contain the letter \"{letter}\" {relation} {n} times.",
       "Ensure that the letter {letter} shows up {relation} {n} times in the text.",
       "Count your letters: '{letter}' should appear {relation} {n} times."},
      // keyword_frequency
      {"Mention the word \"{keyword}\" for {relation} {n} times.",
       "The word \"{keyword}\" should appear {relation} {n} times in your response.",
       "Use the keyword '{keyword}' {relation} {n} times.",
       "Make sure the word {keyword} appears {relation} {n} times.",
       "In your response, the word '{keyword}' should appear {relation} {n} times.",
       "Include the keyword \"{keyword}\" {relation} {n} times.",
       "Your answer must use the word {keyword} {relation} {n} times.",
       "Ensure \"{keyword}\" occurs {relation} {n} times in the text."},
      // sentence_count
      {"The number of sentences in your response should be {relation} {n}.",
       "Your response should contain {relation} {n} sentences.",
       "Answer with {relation} {n} sentences.",
       "Make sure the response has {relation} {n} sentences.",
       "Use {relation} {n} sentences in your answer.",
       "The response must consist of {relation} {n} sentences.",
       "Write {relation} {n} sentences in total.",
       "Keep your answer to {relation} {n} sentences."},
      // word_count
      {"Make sure the response has {relation} {n} words.",
       "The total number of words in your response should be {relation} {n}.",
       "Answer with {relation} {n} words.",
       "Your response should contain {relation} {n} words.",
       "Use {relation} {n} words in your answer.",
       "The response must be {relation} {n} words long.",
       "Write {relation} {n} words in total.",
       "Keep the length of your response to {relation} {n} words."},
      // separator_paragraphs
      {"Separate your response into {n} parts, where each part is separated with ***.",
       "There should be exactly {n} paragraphs in your response, separated by the markdown divider: ***.",
       "Put the response into {n} sections, separated using 3 asterisks ***.",
       "Your answer must contain exactly {n} paragraphs. Separate paragraphs with the markdown divider ***.",
       "Organize your response in exactly {n} paragraphs separated by ***.",
       "Divide the text into {n} paragraphs, using *** on its own line between them.",
       "Write exactly {n} paragraphs, each separated from the next by ***.",
       "The response should have {n} parts divided by the separator ***."},
      // bullet_points
      {"Your answer must contain exactly {n} bullet point in Markdown using the following format:\n* Bullet point one.\n* Bullet point two.",
       "Response must also contain exactly {n} bullet points in markdown format. Use * to indicate bullets, like:\n* xyz.\n* abc.",
       "Include exactly {n} bullet points. Use the markdown bullet points such as:\n* This is a point.",
       "Your response should contain exactly {n} bullet points, each starting with *.",
       "Use exactly {n} markdown bullet points (* point) in your answer.",
       "List exactly {n} bullet points using * at the start of each line.",
       "Present your answer as exactly {n} bullet points in markdown.",
       "Provide exactly {n} bullet points formatted with a leading *."},
      // fixed_responses
      {"Answer with one of the following options: {options}.",
       "Your response should be exactly one of: {options}.",
       "Choose one of these options as your entire response: {options}.",
       "Respond only with one of the following: {options}.",
       "Your entire answer must be one of {options}.",
       "Reply using exactly one option from this list: {options}.",
       "Pick one of the options {options} and output nothing else.",
       "The response must be one of these phrases: {options}."},
      // highlighted
      {"Highlight {relation} {n} text sections, i.e. *highlighted section*.",
       "Make sure to highlight {relation} {n} sections in your answer with markdown, i.e. use *highlighted section*.",
       "Highlight {relation} {n} sections with markdown, i.e. *highlighted section*.",
       "Your answer must contain {relation} {n} highlighted sections, such as *important part*.",
       "Use markdown to highlight {relation} {n} parts of your response, like *this*.",
       "Emphasize {relation} {n} sections by wrapping them in single asterisks.",
       "Include {relation} {n} highlighted phrases written as *highlighted text*.",
       "Mark {relation} {n} key passages with asterisks, e.g. *key passage*."},
      // json_format
      {"Put your entire answer in JSON format.",
       "Your entire output should be wrapped in JSON format.",
       "Format the whole response as valid JSON.",
       "Respond only with a JSON object.",
       "Wrap your entire response in a single JSON document.",
       "Provide your answer as JSON and nothing else.",
       "Make sure your whole reply can be parsed as JSON.",
       "Return the response in JSON format only."},
      // title_format
      {"Your answer must have a title contained in double angular brackets, such as <<title>>.",
       "Include a title wrapped in double angular brackets, i.e. <<title>>.",
       "The response must contain a title wrapped in double angular brackets, i.e. <<title>>.",
       "Add a title to your response, wrapped in double angular brackets like <<my title>>.",
       "Give your answer a title enclosed in << and >>, e.g. <<title>>.",
       "Start with a title in double angular brackets, such as <<poem of joy>>.",
       "Please provide a title, formatted as <<title>>.",
       "Your response needs a title surrounded by double angular brackets, such as <<title>>."},
      // quoted_response
      {"Wrap your entire response with double quotation marks.",
       "Enclose the whole response in double quotes.",
       "Put your entire answer inside double quotation marks.",
       "Your response must begin and end with a double quotation mark.",
       "Wrap the full reply in double quotes, like \"your answer\".",
       "Surround your entire response with double quotation marks.",
       "Make sure the whole response is enclosed in double quotes.",
       "Quote your entire answer using double quotation marks."},
      // end_phrase
      {"The very end of your entire response should read exactly like: {phrase}",
       "Finish your response with this exact phrase: {phrase}",
       "End your response with the exact phrase: {phrase}",
       "Your answer must end with the sentence: {phrase}",
       "Conclude your response with exactly: {phrase}",
       "Make sure the last words of your response are: {phrase}",
       "Close your reply with exactly this phrase, with no other words after it: {phrase}",
       "The response must end with the phrase: {phrase}"},
      // no_commas
      {"Make sure you don't use any commas.",
       "You are not allowed to use any commas in your response.",
       "There should be no commas in your reply.",
       "Do not use any commas in your response.",
       "Avoid commas entirely.",
       "Your answer must not contain a single comma.",
       "Refrain from using commas in the text.",
       "In your entire response, refrain from the use of any commas."},
      // all_capital
      {"Your entire response should be in all capital letters.",
       "Write your whole answer in capital letters only.",
       "The answer should be in all uppercase letters.",
       "Use only capital letters in your response.",
       "Respond in all caps.",
       "Make sure every letter in your response is uppercase.",
       "Your reply must be written entirely in capital letters.",
       "Please answer using uppercase letters only, with no lowercase letters."},
      // all_lowercase
      {"The answer should be in all lowercase letters, with no capitalization.",
       "Your entire response should be in all lowercase letters (no capital letters whatsoever).",
       "The answer should be in all lowercase letters, with no capitalizations.",
       "Use only lowercase letters in your response.",
       "Write your whole answer in lowercase letters.",
       "No capital letters are allowed in your response.",
       "Make sure every letter in your response is lowercase.",
       "Respond entirely in lowercase."},
      // capital_word_frequency
      {"Make sure that words with all capital letters appear {relation} {n} times.",
       "Add stress words which are capitalized. Ensure those stress words appear {relation} {n} times.",
       "Words written in all capital letters should appear {relation} {n} times.",
       "Use {relation} {n} words in all caps.",
       "In your response, words with all capital letters should appear {relation} {n} times.",
       "Include {relation} {n} fully capitalized words.",
       "The number of all-capital words in your response should be {relation} {n}.",
       "Your answer should contain {relation} {n} words written entirely in uppercase."},
      // language_restriction
      {"Your entire response should be in {language}, no other language is allowed.",
       "Please respond only in {language}.",
       "Write your answer in {language}.",
       "The response must be written in {language}.",
       "Use {language} for your entire response.",
       "Answer in {language} and no other language.",
       "Your reply should be in {language} language only.",
       "Respond using only the {language} language."},
  }};
  return bank;
}

inline std::vector<PhrasingTemplate> templates_for(ConstraintType t) {
  std::vector<PhrasingTemplate> out;
  const auto idx = static_cast<std::size_t>(t);
  if (idx >= kFormatTypeCount) return out;
  for (std::string_view text : phrasing_bank()[idx]) out.push_back({t, text});
  return out;
}

}  // namespace dvr
