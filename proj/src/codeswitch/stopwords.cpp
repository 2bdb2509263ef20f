#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "csicl/codeswitch/mix_ratio.hpp"
#include "csicl/util/unicode.hpp"

namespace csicl {

namespace {

// Closed-class words only; content words are left to the script classifier
// or excluded. A word listed for both languages of a pair carries no signal.
const std::map<std::string_view, std::vector<std::string_view>>& raw_lexicons() {
  static const std::map<std::string_view, std::vector<std::string_view>> kLexicons{
      {"en",
       {"the", "of", "and", "to", "in", "is", "was", "that", "for", "it", "with", "as", "on", "be", "at", "by",
        "this", "are", "from", "or", "which", "an", "have", "has", "had", "not", "but", "what", "all", "were",
        "when", "we", "there", "can", "been", "one", "would", "their", "if", "will", "each", "about", "how",
        "up", "out", "them", "then", "she", "many", "some", "so", "these", "other", "into", "him", "his", "her",
        "its", "who", "you", "he", "they", "my", "your", "our", "do", "does", "did", "should", "could", "may",
        "might", "must", "than", "more", "most", "very", "also", "only", "just", "because", "while", "where",
        "why", "whom", "whose", "after", "before", "over", "under", "between", "through", "during", "without",
        "within", "following", "those", "i", "a", "me"}},
      {"es",
       {"el", "la", "los", "las", "de", "del", "y", "en", "que", "un", "una", "unos", "unas", "es", "por",
        "para", "con", "se", "su", "sus", "al", "lo", "como", "más", "pero", "sí", "ya", "o", "este", "esta",
        "estos", "estas", "ese", "esa", "eso", "esto", "entre", "cuando", "muy", "sin", "sobre", "también",
        "hasta", "hay", "donde", "dónde", "quien", "quién", "desde", "todo", "todos", "nos", "durante", "uno",
        "ni", "contra", "otros", "otra", "otro", "ante", "ellos", "ellas", "qué", "cuál", "cuáles", "cómo",
        "yo", "tú", "él", "ella", "nosotros", "mi", "tu", "le", "les", "fue", "está", "están", "ser", "estar",
        "tiene", "tienen", "puede", "pueden", "debe", "siguiente", "siguientes", "porque", "a", "me"}},
      {"fr",
       {"le", "la", "les", "de", "des", "du", "un", "une", "et", "en", "est", "que", "qui", "dans", "pour",
        "pas", "par", "sur", "au", "aux", "avec", "ce", "cette", "ces", "il", "elle", "ils", "elles", "nous",
        "vous", "je", "tu", "son", "sa", "ses", "leur", "leurs", "mais", "ou", "où", "donc", "ni", "car",
        "plus", "très", "sont", "était", "été", "être", "avoir", "ont", "fait", "comme", "tout", "tous",
        "toute", "toutes", "quel", "quelle", "quels", "quelles", "lorsque", "quand", "sans", "sous", "entre",
        "vers", "chez", "aussi", "même", "se", "ne", "suivant", "suivante", "suivants", "parce", "a", "on"}},
      {"id",
       {"yang", "dan", "di", "ke", "dari", "ini", "itu", "dengan", "untuk", "tidak", "ada", "adalah", "pada",
        "juga", "akan", "atau", "dalam", "oleh", "saya", "kami", "kita", "mereka", "dia", "ia", "apa",
        "siapa", "bagaimana", "mengapa", "kapan", "berapa", "sudah", "belum", "telah", "bisa", "dapat",
        "harus", "lebih", "sangat", "karena", "jika", "tetapi", "namun", "sebagai", "bahwa", "para", "seperti",
        "hanya", "antara", "setelah", "sebelum", "tersebut", "suatu", "sebuah", "seorang", "manakah",
        "berikut", "yaitu"}},
      {"tr",
       {"ve", "bir", "bu", "da", "de", "için", "ile", "çok", "ne", "daha", "gibi", "ama", "kadar", "olan",
        "olarak", "sonra", "şey", "var", "yok", "mi", "mı", "mu", "mü", "ben", "sen", "biz", "siz", "onlar",
        "her", "hangi", "nasıl", "neden", "niçin", "kim", "şu", "ki", "veya", "ya", "hem", "ancak", "çünkü",
        "eğer", "değil", "aşağıdakilerden", "hangisi", "hangisidir", "olur", "oldu", "üzerinde", "arasında"}},
      {"sw",
       {"na", "ya", "wa", "za", "kwa", "katika", "ni", "cha", "vya", "hii", "hiyo", "huo", "hizi", "kama",
        "lakini", "au", "pia", "sana", "bila", "baada", "kabla", "kuhusu", "yeye", "wao", "sisi", "mimi",
        "wewe", "nini", "gani", "je", "nani", "wapi", "lini", "kwamba", "ambayo", "ambao", "ambaye", "hakuna",
        "kuna", "kila", "zaidi", "moja", "mbili", "tu", "hadi", "wakati", "ili", "sababu", "la"}},
      {"yo",
       {"ni", "ti", "sí", "si", "àti", "ati", "fún", "fun", "láti", "lati", "pé", "pe", "bí", "bi", "ṣùgbọ́n",
        "sugbon", "tàbí", "tabi", "nínú", "ninu", "náà", "naa", "yìí", "yii", "wọ́n", "wọn", "rẹ̀", "rẹ", "mi",
        "wa", "kan", "kò", "ko", "àwọn", "awọn", "jẹ́", "jẹ", "ṣe", "lórí", "lori", "pẹ̀lú", "pẹlu", "nígbà",
        "nigba", "kí", "ki", "mo", "èwo", "ewo", "tani", "níbo", "nibo", "báwo", "bawo", "ló", "lo"}},
      {"nl",
       {"de", "het", "een", "en", "van", "dat", "op", "te", "voor", "met", "zijn", "er", "niet", "aan", "om",
        "ook", "als", "bij", "maar", "door", "naar", "dan", "uit", "wat", "wie", "welke", "hoe", "waarom",
        "waar", "deze", "die", "dit", "worden", "wordt", "werd", "heeft", "hebben", "kan", "zal", "nog", "geen",
        "tot", "ze", "hij", "zij", "wij", "ik", "je", "mijn", "hun", "onder", "tussen", "na", "zonder", "in",
        "is", "of", "over", "was"}},
      {"de",
       {"der", "die", "das", "und", "ist", "nicht", "ein", "eine", "zu", "den", "dem", "mit", "von", "sich",
        "des", "auf", "für", "im", "es", "auch", "als", "wie", "bei", "oder", "aus", "wird", "werden", "sind",
        "nach", "noch", "nur", "wenn", "kann", "ich", "sie", "er", "wir", "ihr", "welche", "welcher", "warum",
        "wo", "über", "unter", "zwischen", "ohne", "durch", "gegen", "in", "an", "was"}},
  };
  return kLexicons;
}

}  // namespace

const std::unordered_set<std::string>* stopwords(std::string_view code) noexcept {
  static const std::map<std::string, std::unordered_set<std::string>, std::less<>> kNormalized = [] {
    std::map<std::string, std::unordered_set<std::string>, std::less<>> out;
    for (const auto& [lang, words] : raw_lexicons()) {
      auto& set = out[std::string(lang)];
      for (auto w : words) set.insert(unicode::to_lower(unicode::nfkc(w)));
    }
    return out;
  }();
  const auto it = kNormalized.find(code);
  return it == kNormalized.end() ? nullptr : &it->second;
}

}  // namespace csicl
