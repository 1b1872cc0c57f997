// Character-trigram language identification. Profiles are built once from
// small bundled seed texts (function words plus place/person names, which is
// what this service ever sees); detection is add-alpha log-likelihood over a
// shared trigram vocabulary, softmaxed into probabilities.

import { embeddingKey } from "./text.js";

const SEED_TEXTS: Record<string, string> = {
  en: "the kingdom of bahrain is a small state in the gulf and its capital is manama the united states and the united kingdom share the english language germany france and russia are countries munich is a city in germany the north sea lies west of denmark",
  fr: "le royaume de bahreïn est un petit état du golfe et sa capitale est manama la france et l'allemagne sont des pays voisins munich est une ville d'allemagne la mer du nord se trouve à l'ouest du danemark l'église et le château sont anciens",
  de: "das königreich bahrain ist ein kleiner staat am golf und seine hauptstadt ist manama deutschland frankreich und russland sind länder münchen ist eine stadt in bayern die nordsee liegt westlich von dänemark straße und fluß führen zur brücke",
  es: "el reino de baréin es un pequeño estado del golfo y su capital es manama españa francia y alemania son países múnich es una ciudad de alemania el mar del norte está al oeste de dinamarca la iglesia y el castillo son antiguos",
  it: "il regno del bahrein è un piccolo stato del golfo e la sua capitale è manama l'italia la francia e la germania sono paesi monaco di baviera è una città della germania il mare del nord si trova a ovest della danimarca la chiesa e il castello sono antichi",
  pt: "o reino do barém é um pequeno estado do golfo e a sua capital é manama portugal frança e alemanha são países munique é uma cidade da alemanha o mar do norte fica a oeste da dinamarca a igreja e o castelo são antigos",
  nl: "het koninkrijk bahrein is een kleine staat aan de golf en de hoofdstad is manama nederland frankrijk en duitsland zijn landen münchen is een stad in duitsland de noordzee ligt ten westen van denemarken de kerk en het kasteel zijn oud",
  pl: "królestwo bahrajnu to małe państwo nad zatoką a jego stolicą jest manama polska francja i niemcy to kraje monachium to miasto w niemczech morze północne leży na zachód od danii kościół i zamek są stare",
  sv: "kungariket bahrain är en liten stat vid viken och dess huvudstad är manama sverige frankrike och tyskland är länder münchen är en stad i tyskland nordsjön ligger väster om danmark kyrkan och slottet är gamla",
  ru: "королевство бахрейн это небольшое государство в заливе и его столица манама россия франция и германия это страны мюнхен это город в германии северное море лежит к западу от дании церковь и замок старые",
  uk: "королівство це невелика держава в затоці а його столиця відома україна франція та німеччина це країни мюнхен це місто в німеччині північне море лежить на захід від данії церква і замок старі",
  bg: "кралството е малка държава в залива и неговата столица е известна българия франция и германия са държави мюнхен е град в германия северно море се намира на запад от дания църквата и замъкът са стари",
  el: "το βασίλειο του μπαχρέιν είναι ένα μικρό κράτος στον κόλπο και η πρωτεύουσά του είναι η μανάμα η ελλάδα η γαλλία και η γερμανία είναι χώρες το μόναχο είναι πόλη της γερμανίας η βόρεια θάλασσα βρίσκεται δυτικά της δανίας",
};

const ALPHA = 0.5;

export interface LanguageScore {
  language: string;
  probability: number;
}

function trigrams(text: string): string[] {
  const out: string[] = [];
  for (const word of embeddingKey(text).toLowerCase().split(" ")) {
    if (word === "") continue;
    const points = Array.from(` ${word} `);
    for (let i = 0; i + 3 <= points.length; i++) {
      out.push(points.slice(i, i + 3).join(""));
    }
  }
  return out;
}

interface Profile {
  counts: Map<string, number>;
  total: number;
}

const profiles = new Map<string, Profile>();
let vocabularySize = 0;

function buildProfiles(): void {
  const vocabulary = new Set<string>();
  for (const [lang, seed] of Object.entries(SEED_TEXTS)) {
    const counts = new Map<string, number>();
    let total = 0;
    for (const gram of trigrams(seed)) {
      counts.set(gram, (counts.get(gram) ?? 0) + 1);
      vocabulary.add(gram);
      total++;
    }
    profiles.set(lang, { counts, total });
  }
  vocabularySize = vocabulary.size;
}

buildProfiles();

export const LANGUAGES = [...profiles.keys()].sort();

export function detect(text: string, topK: number): LanguageScore[] {
  const query = trigrams(text);
  if (query.length === 0) {
    throw new Error("cannot identify the language of an empty text");
  }
  const logLikelihoods = new Map<string, number>();
  for (const [lang, profile] of profiles) {
    let sum = 0;
    const denominator = profile.total + ALPHA * vocabularySize;
    for (const gram of query) {
      sum += Math.log(((profile.counts.get(gram) ?? 0) + ALPHA) / denominator);
    }
    logLikelihoods.set(lang, sum);
  }
  const peak = Math.max(...logLikelihoods.values());
  let normalizer = 0;
  for (const value of logLikelihoods.values()) {
    normalizer += Math.exp(value - peak);
  }
  const scores = [...logLikelihoods.entries()].map(([language, value]) => ({
    language,
    probability: Math.exp(value - peak) / normalizer,
  }));
  scores.sort(
    (a, b) => b.probability - a.probability || a.language.localeCompare(b.language),
  );
  return scores.slice(0, topK);
}
