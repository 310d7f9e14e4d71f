"""Writes tests/data/porter_vocab.tsv: word <tab> stem from NLTK's Porter
stemmer in MARTIN_EXTENSIONS mode (the behaviour of Martin Porter's own C
release). Run once; the output is checked in."""
import pathlib
from nltk.stem.porter import PorterStemmer

WORDS = """
caresses ponies ties caress cats feed agreed plastered bled motoring sing
conflated troubled sized hopping tanned falling hissing fizzed failing filing
happy sky relational conditional rational valenci hesitanci digitizer
conformabli radicalli differentli vileli analogousli vietnamization predication
operator feudalism decisiveness hopefulness callousness formaliti sensitiviti
sensibiliti triplicate formative formalize electriciti electrical hopeful
goodness revival allowance inference airliner gyroscopic adjustable defensible
irritant replacement adjustment dependent adoption homologou communism
activate angulariti homologous effective bowdlerize probate rate cease
controll roll generalization oscillators studies study studying studied
aging ageing aged ages age longevity lifespan lifespans mice mouse telomere
telomeres telomerase caloric restriction restricted dietary diets diet
senescence senescent cells cellular mitochondria mitochondrial oxidative stress
stresses inflammation inflammatory insulin signaling signalling pathway
pathways expression expressed genes genetic genome genomic mortality
centenarians centenarian elderly frailty cognitive decline neurodegeneration
proteostasis autophagy autophagic sirtuin sirtuins rapamycin metformin
organisms organism worms nematode drosophila yeast humans human population
populations analysis analyses analyzed measurements measured increased
increasing decreases decreased associated association associations
relational generalizations hopelessness agreement agreements logical
biological biology archaeology possibly possible connection connections
connected connecting running runner runs ran easily fairly sensational
traditional reference references referred referring knowledge knowledgeable
""".split()

def main():
    stemmer = PorterStemmer(mode=PorterStemmer.MARTIN_EXTENSIONS)
    out = pathlib.Path(__file__).resolve().parents[1] / "data" / "porter_vocab.tsv"
    seen = []
    for w in WORDS:
        if w not in seen:
            seen.append(w)
    out.write_text("".join(f"{w}\t{stemmer.stem(w)}\n" for w in seen))

if __name__ == "__main__":
    main()
