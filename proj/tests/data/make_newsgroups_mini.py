import os, random
random.seed(7)
topics = {
 "comp.graphics": "image pixel render shader polygon texture bitmap format color display resolution vertex raster jpeg graphics opengl".split(),
 "rec.autos": "engine car brake tire dealer transmission mileage sedan wheel fuel oil clutch highway driver motor".split(),
 "sci.space": "orbit launch shuttle nasa rocket satellite moon planet mission payload astronaut telescope lunar mars booster".split(),
 "talk.politics.guns": "gun firearm rifle weapon amendment militia ammunition pistol handgun crime law ban government police permit".split(),
}
common = "people think know question problem thing really good time year work different number point course system information believe".split()
root = os.path.join(os.path.dirname(os.path.abspath(__file__)), "newsgroups_mini")
for t, words in topics.items():
    os.makedirs(f"{root}/{t}", exist_ok=True)
    for d in range(10):
        n = random.randint(40, 70)
        toks = [random.choice(words) if random.random() < 0.55 else random.choice(common) for _ in range(n)]
        lines = [" ".join(toks[i:i+12]) for i in range(0, n, 12)]
        body = f"Subject: re {toks[0]} {toks[1]}\n\n" + "\n".join(lines) + "\n"
        with open(f"{root}/{t}/{51000 + d * 7 + len(t)}", "w") as f:
            f.write(body)
