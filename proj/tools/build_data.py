#!/usr/bin/env python3
# Copyright (c) 2026, The granary-curate Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Builds the shipped data/ directory from the small seed corpus below.

Outputs:
  data/charset.txt          allowed characters, one per line
  data/phrases/<lang>.txt   hallucinated phrase lists
  data/exemplars/<lang>.tsv P&C restoration exemplars (before<TAB>after)
  data/histograms/<lang>.hist frequent characters per language
  data/wordlists/<lang>.words word lists for the text LID backend and mocks

Run from the repository root:  python3 tools/build_data.py
"""

import os
import sys
import unicodedata

LANGS = ["bg", "cs", "da", "de", "el", "en", "es", "et", "fi", "fr", "hr", "hu", "it",
         "lt", "lv", "mt", "nl", "pl", "pt", "ro", "ru", "sk", "sl", "sv", "uk"]

LATIN = "abcdefghijklmnopqrstuvwxyz"
ALPHABETS = {
    "bg": "абвгдежзийклмнопрстуфхцчшщъьюя",
    "ru": "абвгдеёжзийклмнопрстуфхцчшщъыьэюя",
    "uk": "абвгґдеєжзиіїйклмнопрстуфхцчшщьюя",
    "el": "αβγδεζηθικλμνξοπρστυφχψωάέήίόύώϊϋΐΰς",
    "cs": "áčďéěíňóřšťúůýž", "da": "æøå", "de": "äöüß", "en": "", "es": "áéíñóúü",
    "et": "äõöüšž", "fi": "äöå", "fr": "àâæçéèêëîïôœùûüÿ", "hr": "čćđšž",
    "hu": "áéíóöőúüű", "it": "àèéìíîòóùú", "lt": "ąčęėįšųūž", "lv": "āčēģīķļņšūž",
    "mt": "àċèġħìòù", "nl": "éëïóöü", "pl": "ąćęłńóśźż", "pt": "áâãàçéêíóôõú",
    "ro": "ăâîșț", "sk": "áäčďéíĺľňóôŕšťúýž", "sl": "čšž", "sv": "åäö",
}
NON_LATIN = {"bg", "ru", "uk", "el"}

WORDS = {
    "bg": "здравей благодаря днес утре хубаво много град човек вода къща работа време",
    "cs": "dobrý děkuji dnes zítra město člověk práce čas řeka přítel škola jídlo",
    "da": "goddag tak idag imorgen byen menneske arbejde tiden vand venner skolen hjemme",
    "de": "guten danke heute morgen stadt mensch arbeit zeit wasser freund schule essen",
    "el": "καλημέρα ευχαριστώ σήμερα αύριο πόλη άνθρωπος δουλειά χρόνος νερό φίλος σχολείο φαγητό",
    "en": "hello today tomorrow city people work water friend school food house weather",
    "es": "hola gracias hoy mañana ciudad persona trabajo tiempo agua amigo escuela comida",
    "et": "tere aitäh täna homme linn inimene töö aeg vesi sõber kool toit",
    "fi": "hyvää kiitos tänään huomenna kaupunki ihminen työ aika vesi ystävä koulu ruoka",
    "fr": "bonjour merci aujourd'hui demain ville personne travail temps eau ami école nourriture",
    "hr": "dobar hvala danas sutra grad čovjek posao vrijeme voda prijatelj škola hrana",
    "hu": "jó köszönöm ma holnap város ember munka idő víz barát iskola étel",
    "it": "buongiorno grazie oggi domani città persona lavoro tempo acqua amico scuola cibo",
    "lt": "labas ačiū šiandien rytoj miestas žmogus darbas laikas vanduo draugas mokykla maistas",
    "lv": "sveiki paldies šodien rīt pilsēta cilvēks darbs laiks ūdens draugs skola ēdiens",
    "mt": "bonġu grazzi illum għada belt persuna xogħol ħin ilma ħabib skola ikel",
    "nl": "hallo bedankt vandaag morgen stad mens werk tijd water vriend school eten",
    "pl": "dzień dziękuję dzisiaj jutro miasto człowiek praca czas woda przyjaciel szkoła jedzenie",
    "pt": "olá obrigado hoje amanhã cidade pessoa trabalho tempo água amigo escola comida",
    "ro": "bună mulțumesc astăzi mâine oraș om muncă timp apă prieten școală mâncare",
    "ru": "привет спасибо сегодня завтра город человек работа время вода друг школа еда",
    "sk": "dobrý ďakujem dnes zajtra mesto človek práca čas voda priateľ škola jedlo",
    "sl": "dober hvala danes jutri mesto človek delo čas voda prijatelj šola hrana",
    "sv": "hej tack idag imorgon staden människa arbete tid vatten vän skola mat",
    "uk": "привіт дякую сьогодні завтра місто людина робота час вода друг школа їжа",
}

PHRASES = {
    "bg": ["Благодаря за вниманието", "Абонирайте се за канала"],
    "cs": ["Titulky vytvořil JohnyX", "Děkuji za pozornost"],
    "da": ["Tak fordi du så med", "Undertekster af Amara.org-fællesskabet"],
    "de": ["Untertitel im Auftrag des ZDF", "Vielen Dank fürs Zuschauen", "Untertitelung des ZDF"],
    "el": ["Ευχαριστώ για την προσοχή σας", "Υπότιτλοι από την κοινότητα Amara.org"],
    "en": ["Thank you very much", "Thanks for watching", "Subtitles by the Amara.org community",
           "Please subscribe to my channel"],
    "es": ["Subtítulos realizados por la comunidad de Amara.org", "Gracias por ver el vídeo"],
    "et": ["Aitäh vaatamast", "Subtiitrid Amara.org kogukonnalt"],
    "fi": ["Kiitos katsomisesta", "Tekstitys Amara.org-yhteisöltä"],
    "fr": ["Sous-titrage Société Radio-Canada", "Merci d'avoir regardé cette vidéo",
           "Sous-titres réalisés par la communauté d'Amara.org"],
    "hr": ["Hvala na gledanju", "Prijevod titlova Amara.org"],
    "hu": ["Köszönöm a figyelmet", "Feliratok az Amara.org közösségtől"],
    "it": ["Sottotitoli creati dalla comunità Amara.org", "Grazie per la visione"],
    "lt": ["Ačiū, kad žiūrėjote", "Subtitrai Amara.org bendruomenės"],
    "lv": ["Paldies par skatīšanos", "Subtitri no Amara.org kopienas"],
    "mt": ["Grazzi talli rajtu", "Sottotitli mill-komunità Amara.org"],
    "nl": ["Ondertiteling door de Amara.org gemeenschap", "Bedankt voor het kijken"],
    "pl": ["Napisy stworzone przez społeczność Amara.org", "Dziękuję za obejrzenie"],
    "pt": ["Legendas pela comunidade Amara.org", "Obrigado por assistir"],
    "ro": ["Mulțumesc pentru vizionare", "Subtitrări realizate de comunitatea Amara.org"],
    "ru": ["Субтитры создавал DimaTorzok", "Продолжение следует...", "Спасибо за просмотр"],
    "sk": ["Ďakujem za pozornosť", "Titulky vytvorila komunita Amara.org"],
    "sl": ["Hvala za ogled", "Podnapisi skupnosti Amara.org"],
    "sv": ["Tack för att du tittade", "Undertexter från Amara.org-gemenskapen"],
    "uk": ["Дякую за перегляд", "Субтитри зроблені спільнотою Amara.org"],
}

EXEMPLARS = {
    "bg": [("здравейте как сте днес", "Здравейте, как сте днес?"),
           ("благодаря ви за поканата", "Благодаря ви за поканата.")],
    "cs": [("dobrý den jak se máte", "Dobrý den, jak se máte?"),
           ("děkuji vám za pozvání", "Děkuji vám za pozvání.")],
    "da": [("goddag hvordan har du det", "Goddag, hvordan har du det?"),
           ("tak for invitationen", "Tak for invitationen.")],
    "de": [("guten tag wie geht es ihnen", "Guten Tag, wie geht es Ihnen?"),
           ("vielen dank für die einladung", "Vielen Dank für die Einladung.")],
    "el": [("καλημέρα τι κάνετε", "Καλημέρα, τι κάνετε;"),
           ("ευχαριστώ για την πρόσκληση", "Ευχαριστώ για την πρόσκληση.")],
    "en": [("hello how are you today", "Hello, how are you today?"),
           ("the council met in brussels on monday", "The Council met in Brussels on Monday.")],
    "es": [("hola cómo estás hoy", "Hola, ¿cómo estás hoy?"),
           ("gracias por la invitación", "Gracias por la invitación.")],
    "et": [("tere kuidas läheb", "Tere, kuidas läheb?"),
           ("aitäh kutse eest", "Aitäh kutse eest.")],
    "fi": [("hyvää päivää mitä kuuluu", "Hyvää päivää, mitä kuuluu?"),
           ("kiitos kutsusta", "Kiitos kutsusta.")],
    "fr": [("bonjour comment allez vous", "Bonjour, comment allez-vous ?"),
           ("merci pour l'invitation madame la présidente", "Merci pour l'invitation, Madame la Présidente.")],
    "hr": [("dobar dan kako ste", "Dobar dan, kako ste?"),
           ("hvala na pozivu", "Hvala na pozivu.")],
    "hu": [("jó napot hogy van", "Jó napot, hogy van?"),
           ("köszönöm a meghívást", "Köszönöm a meghívást.")],
    "it": [("buongiorno come sta", "Buongiorno, come sta?"),
           ("grazie per l'invito signor presidente", "Grazie per l'invito, signor Presidente.")],
    "lt": [("laba diena kaip sekasi", "Laba diena, kaip sekasi?"),
           ("ačiū už kvietimą", "Ačiū už kvietimą.")],
    "lv": [("labdien kā jums klājas", "Labdien, kā jums klājas?"),
           ("paldies par ielūgumu", "Paldies par ielūgumu.")],
    "mt": [("bonġu kif inti", "Bonġu, kif inti?"),
           ("grazzi tal-istedina", "Grazzi tal-istedina.")],
    "nl": [("goedendag hoe gaat het", "Goedendag, hoe gaat het?"),
           ("bedankt voor de uitnodiging", "Bedankt voor de uitnodiging.")],
    "pl": [("dzień dobry jak się pan ma", "Dzień dobry, jak się pan ma?"),
           ("dziękuję za zaproszenie", "Dziękuję za zaproszenie.")],
    "pt": [("bom dia como está", "Bom dia, como está?"),
           ("obrigado pelo convite", "Obrigado pelo convite.")],
    "ro": [("bună ziua ce mai faceți", "Bună ziua, ce mai faceți?"),
           ("mulțumesc pentru invitație", "Mulțumesc pentru invitație.")],
    "ru": [("здравствуйте как ваши дела", "Здравствуйте, как ваши дела?"),
           ("спасибо за приглашение", "Спасибо за приглашение.")],
    "sk": [("dobrý deň ako sa máte", "Dobrý deň, ako sa máte?"),
           ("ďakujem za pozvanie", "Ďakujem za pozvanie.")],
    "sl": [("dober dan kako ste", "Dober dan, kako ste?"),
           ("hvala za povabilo", "Hvala za povabilo.")],
    "sv": [("god dag hur mår du", "God dag, hur mår du?"),
           ("tack för inbjudan", "Tack för inbjudan.")],
    "uk": [("добрий день як справи", "Добрий день, як справи?"),
           ("дякую за запрошення", "Дякую за запрошення.")],
}

PUNCT = ".,;:!?'\"-()[]/%&+*=@#$_<>«»„“”‘’‚–—…·¿¡°§€"
DIGITS = "0123456789"


def charset():
    chars = set(chr(c) for c in range(0x20, 0x7F))
    chars.update(chr(c) for c in range(0xC0, 0x100) if c not in (0xD7, 0xF7))
    chars.update(chr(c) for c in range(0x100, 0x180))
    chars.update(chr(c) for c in range(0x218, 0x21C))  # Ș ș Ț ț
    chars.update(chr(c) for c in range(0x386, 0x3CF) if unicodedata.category(chr(c)).startswith("L"))
    chars.update(chr(c) for c in range(0x400, 0x460))
    chars.update("Ґґ")
    chars.update(PUNCT)
    return sorted(chars)


def escape(ch):
    if ch.isspace() or ch == "\\" or not ch.isprintable():
        return "\\u%04X" % ord(ch)
    return ch


def main():
    root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "data")
    for sub in ("phrases", "exemplars", "histograms", "wordlists"):
        os.makedirs(os.path.join(root, sub), exist_ok=True)

    allowed = charset()
    with open(os.path.join(root, "charset.txt"), "w", encoding="utf-8") as f:
        for ch in allowed:
            f.write(escape(ch) + "\n")
    allowed = set(allowed)

    # Words shared between languages would make the wordlist LID ambiguous.
    owners = {}
    for lang in LANGS:
        for w in WORDS[lang].split():
            owners.setdefault(w, set()).add(lang)

    for lang in LANGS:
        words = [w for w in WORDS[lang].split() if len(owners[w]) == 1]
        with open(os.path.join(root, "wordlists", lang + ".words"), "w", encoding="utf-8") as f:
            f.write("\n".join(words) + "\n")

        with open(os.path.join(root, "phrases", lang + ".txt"), "w", encoding="utf-8") as f:
            f.write("# Frequently hallucinated phrases (%s). One per line.\n" % lang)
            f.write("\n".join(PHRASES[lang]) + "\n")

        with open(os.path.join(root, "exemplars", lang + ".tsv"), "w", encoding="utf-8") as f:
            for before, after in EXEMPLARS[lang]:
                f.write(before + "\t" + after + "\n")

        seed = WORDS[lang] + " ".join(p for pair in EXEMPLARS[lang] for p in pair)
        letters = set(ALPHABETS[lang]) | {c for c in seed.lower() if c.isalpha()}
        if lang not in NON_LATIN:
            letters |= set(LATIN)
        hist = set()
        for c in letters:
            hist.add(c)
            hist.update(c.upper() if len(c.upper()) == 1 else "")
        hist |= set(DIGITS) | set(PUNCT)
        missing = sorted(c for c in hist if c not in allowed)
        if missing:
            sys.exit("histogram for %s uses characters outside the charset: %r" % (lang, missing))
        with open(os.path.join(root, "histograms", lang + ".hist"), "w", encoding="utf-8") as f:
            for ch in sorted(hist):
                f.write(escape(ch) + "\n")

    print("wrote data for %d languages, charset of %d characters" % (len(LANGS), len(allowed)))


if __name__ == "__main__":
    main()
