#pragma once

// Generated by tools/embed_assets.py from data/. Do not edit by hand.

#include <string_view>

namespace scaffold::assets {

inline constexpr std::string_view kExemplarBank = R"ASSET({"subject": "math", "band": "emerging", "student": "I'm not sure how to find 3 times 14.", "tutor": "Let's break it into parts. Step 1: 3 times 10 is 30. Step 2: 3 times 4 is 12. Step 3: add them, 30 plus 12. What do you get?"}
{"subject": "math", "band": "developing", "student": "I think 2/4 is bigger than 1/2?", "tutor": "Good thinking to compare them. Try drawing two bars of the same size. Shade 2 of 4 parts and 1 of 2 parts. What do you notice about the shaded areas?"}
{"subject": "math", "band": "proficient", "student": "x + 7 = 12, so x is 5.", "tutor": "That's right. Can you check your answer by putting 5 back into the equation?"}
{"subject": "math", "band": "advanced", "student": "The slope is 3 because y goes up 6 when x goes up 2.", "tutor": "Exactly. How would the line change if the slope were negative?"}
{"subject": "science", "band": "emerging", "student": "I'm not sure what photosynthesis is.", "tutor": "Let's take it one step at a time. Step 1: plants take in sunlight. Step 2: they take in water and air. Step 3: they make their own food from these. Which part do plants get from the Sun?"}
{"subject": "science", "band": "developing", "student": "Maybe ice melts because it gets warm?", "tutor": "You're on the right track. Heat gives the water particles more energy. What do you think the particles do when they get more energy?"}
{"subject": "science", "band": "proficient", "student": "Speed is distance divided by time, so 120 km in 2 hours is 60 km per hour.", "tutor": "Nice work. What would the speed be if the trip took 3 hours instead?"}
{"subject": "science", "band": "advanced", "student": "Density is mass over volume, so the block floats if it's less dense than water.", "tutor": "Correct. Can you predict what happens to a block with a density of 1.2 grams per cubic cm?"}
)ASSET";

inline constexpr std::string_view kScenarioTemplates = R"ASSET({
  "version": "1",
  "templates": [
    {"id": "math-recall-1", "subject": "math", "task_type": "recall", "text": "What is the name for a number that can only be divided evenly by 1 and itself? Give an example bigger than {n}.", "params": {"n": {"6": [5, 20], "8": [20, 60]}}},
    {"id": "math-recall-2", "subject": "math", "task_type": "recall", "text": "How many degrees are in the angles of a {shape} added together?", "params": {"shape": {"choices": {"6": ["triangle", "square", "rectangle"], "8": ["triangle", "pentagon", "hexagon"]}}}},
    {"id": "math-recall-3", "subject": "math", "task_type": "recall", "text": "What does the word {term} mean in math?", "params": {"term": {"choices": {"6": ["perimeter", "area", "factor", "ratio"], "8": ["slope", "exponent", "integer", "variable"]}}}},
    {"id": "math-recall-4", "subject": "math", "task_type": "recall", "text": "Write the formula for the {measure} of a {shape}.", "params": {"measure": {"choices": {"6": ["area", "perimeter"], "8": ["area", "volume"]}}, "shape": {"choices": {"6": ["rectangle", "triangle"], "8": ["circle", "cylinder", "triangle"]}}}},
    {"id": "math-recall-5", "subject": "math", "task_type": "recall", "text": "What is {a} squared?", "params": {"a": {"6": [2, 12], "8": [11, 25]}}},
    {"id": "math-comprehension-1", "subject": "math", "task_type": "comprehension", "text": "Is {a}/{b} equal to {c}/{d}? Explain in your own words how you can tell.", "params": {"a": {"6": [1, 4], "8": [2, 7]}, "b": {"6": [5, 9], "8": [9, 13]}, "c": {"6": [2, 2], "8": [3, 3]}, "d": {"6": [10, 10], "8": [14, 14]}}},
    {"id": "math-comprehension-2", "subject": "math", "task_type": "comprehension", "text": "A graph shows a line going up from left to right. What does that tell you about the {quantity}?", "params": {"quantity": {"choices": {"6": ["money saved each week", "height of a plant"], "8": ["rate of change", "relationship between x and y"]}}}},
    {"id": "math-comprehension-3", "subject": "math", "task_type": "comprehension", "text": "What does it mean when we say {a} percent of a number?", "params": {"a": {"6": [10, 50], "8": [5, 95]}}},
    {"id": "math-comprehension-4", "subject": "math", "task_type": "comprehension", "text": "Why do we need a common denominator to add 1/{a} and 1/{b}?", "params": {"a": {"6": [2, 5], "8": [3, 9]}, "b": {"6": [6, 8], "8": [10, 15]}}},
    {"id": "math-comprehension-5", "subject": "math", "task_type": "comprehension", "text": "Describe what the letter x stands for in the equation x + {a} = {b}.", "params": {"a": {"6": [2, 9], "8": [11, 40]}, "b": {"6": [10, 20], "8": [41, 90]}}},
    {"id": "math-computation-1", "subject": "math", "task_type": "computation", "text": "Compute {a} times {b}.", "params": {"a": {"6": [12, 40], "8": [25, 99]}, "b": {"6": [3, 9], "8": [11, 30]}}},
    {"id": "math-computation-2", "subject": "math", "task_type": "computation", "text": "Solve for x: {a}x + {b} = {c}.", "params": {"a": {"6": [2, 5], "8": [3, 12]}, "b": {"6": [1, 9], "8": [-20, 20]}, "c": {"6": [20, 40], "8": [-30, 80]}}},
    {"id": "math-computation-3", "subject": "math", "task_type": "computation", "text": "Find the area of a rectangle that is {a} cm long and {b} cm wide.", "params": {"a": {"6": [3, 15], "8": [8, 40]}, "b": {"6": [2, 9], "8": [5, 25]}}},
    {"id": "math-computation-4", "subject": "math", "task_type": "computation", "text": "What is {a} percent of {b}?", "params": {"a": {"6": [10, 50], "8": [5, 95]}, "b": {"6": [20, 200], "8": [40, 900]}}},
    {"id": "math-computation-5", "subject": "math", "task_type": "computation", "text": "Add the fractions 1/{a} and 1/{b} and simplify.", "params": {"a": {"6": [2, 4], "8": [3, 8]}, "b": {"6": [5, 8], "8": [9, 12]}}},
    {"id": "math-reasoning-1", "subject": "math", "task_type": "reasoning", "text": "A shirt costs ${a}. It is on sale for {b} percent off. Is it cheaper than a ${c} shirt? Explain.", "params": {"a": {"6": [20, 40], "8": [30, 90]}, "b": {"6": [10, 50], "8": [15, 45]}, "c": {"6": [15, 30], "8": [25, 70]}}},
    {"id": "math-reasoning-2", "subject": "math", "task_type": "reasoning", "text": "Sam says {a} is always bigger than {a}/2. Is Sam right for every number? How do you know?", "params": {"a": {"choices": {"6": ["x", "n"], "8": ["x", "y", "n"]}}}},
    {"id": "math-reasoning-3", "subject": "math", "task_type": "reasoning", "text": "A bus holds {a} people. How many buses are needed for {b} students? Explain your thinking.", "params": {"a": {"6": [20, 40], "8": [30, 60]}, "b": {"6": [50, 150], "8": [100, 400]}}},
    {"id": "math-reasoning-4", "subject": "math", "task_type": "reasoning", "text": "Which is the better deal: {a} apples for ${b} or {c} apples for ${d}? Show why.", "params": {"a": {"6": [2, 6], "8": [3, 9]}, "b": {"6": [1, 5], "8": [2, 8]}, "c": {"6": [7, 12], "8": [10, 20]}, "d": {"6": [6, 10], "8": [9, 18]}}},
    {"id": "math-reasoning-5", "subject": "math", "task_type": "reasoning", "text": "The pattern goes {a}, {b}, {c}. What comes next, and what is the rule?", "params": {"a": {"6": [1, 5], "8": [2, 9]}, "b": {"6": [6, 10], "8": [10, 20]}, "c": {"6": [11, 15], "8": [21, 40]}}},
    {"id": "science-recall-1", "subject": "science", "task_type": "recall", "text": "What is the job of the {part} in a {cell} cell?", "params": {"part": {"choices": {"6": ["nucleus", "cell membrane", "cell wall"], "8": ["mitochondria", "ribosome", "chloroplast"]}}, "cell": {"choices": {"6": ["plant", "animal"], "8": ["plant", "animal"]}}}},
    {"id": "science-recall-2", "subject": "science", "task_type": "recall", "text": "Name the three states of matter and give an example of {thing} in one of them.", "params": {"thing": {"choices": {"6": ["water", "iron", "air"], "8": ["carbon dioxide", "mercury", "oxygen"]}}}},
    {"id": "science-recall-3", "subject": "science", "task_type": "recall", "text": "What is {term}?", "params": {"term": {"choices": {"6": ["photosynthesis", "erosion", "gravity"], "8": ["DNA", "an atom", "a chemical reaction"]}}}},
    {"id": "science-recall-4", "subject": "science", "task_type": "recall", "text": "Which planet is number {n} from the Sun?", "params": {"n": {"6": [1, 4], "8": [3, 8]}}},
    {"id": "science-recall-5", "subject": "science", "task_type": "recall", "text": "What unit do scientists use to measure {quantity}?", "params": {"quantity": {"choices": {"6": ["mass", "length", "temperature"], "8": ["force", "energy", "electric current"]}}}},
    {"id": "science-comprehension-1", "subject": "science", "task_type": "comprehension", "text": "Explain why {event} happens.", "params": {"event": {"choices": {"6": ["ice melting in the sun", "a puddle drying up", "day and night"], "8": ["the seasons changing", "a metal spoon getting hot in soup", "tides in the ocean"]}}}},
    {"id": "science-comprehension-2", "subject": "science", "task_type": "comprehension", "text": "In a food chain, what happens to the {animal} if the plants disappear?", "params": {"animal": {"choices": {"6": ["rabbits", "deer"], "8": ["hawks", "foxes", "snakes"]}}}},
    {"id": "science-comprehension-3", "subject": "science", "task_type": "comprehension", "text": "Describe what a {model} shows and what it leaves out.", "params": {"model": {"choices": {"6": ["globe", "map of the water cycle"], "8": ["model of an atom", "diagram of the solar system"]}}}},
    {"id": "science-comprehension-4", "subject": "science", "task_type": "comprehension", "text": "Why does a ball roll {distance} meters farther on a smooth floor than on grass?", "params": {"distance": {"6": [1, 5], "8": [2, 12]}}},
    {"id": "science-comprehension-5", "subject": "science", "task_type": "comprehension", "text": "What does it mean that {thing} is a renewable resource?", "params": {"thing": {"choices": {"6": ["wind", "sunlight", "wood"], "8": ["solar power", "geothermal heat", "biomass"]}}}},
    {"id": "science-computation-1", "subject": "science", "task_type": "computation", "text": "A car travels {d} km in {t} hours. What is its average speed?", "params": {"d": {"6": [60, 200], "8": [100, 600]}, "t": {"6": [2, 4], "8": [2, 8]}}},
    {"id": "science-computation-2", "subject": "science", "task_type": "computation", "text": "An object has a mass of {m} g and a volume of {v} cubic cm. What is its density?", "params": {"m": {"6": [20, 100], "8": [50, 500]}, "v": {"6": [5, 20], "8": [10, 80]}}},
    {"id": "science-computation-3", "subject": "science", "task_type": "computation", "text": "Water starts at {a} degrees C and heats up by {b} degrees. What is the new temperature?", "params": {"a": {"6": [10, 30], "8": [-10, 40]}, "b": {"6": [5, 40], "8": [15, 70]}}},
    {"id": "science-computation-4", "subject": "science", "task_type": "computation", "text": "A force of {f} N pushes a {m} kg box. What is its acceleration?", "params": {"f": {"6": [10, 40], "8": [20, 200]}, "m": {"6": [2, 5], "8": [2, 20]}}},
    {"id": "science-computation-5", "subject": "science", "task_type": "computation", "text": "A plant grows {a} cm each week. How tall is it after {w} weeks if it started at {s} cm?", "params": {"a": {"6": [1, 4], "8": [2, 9]}, "w": {"6": [3, 8], "8": [5, 15]}, "s": {"6": [2, 10], "8": [5, 30]}}},
    {"id": "science-reasoning-1", "subject": "science", "task_type": "reasoning", "text": "You put one plant in the sun and one in a dark closet for {d} days. What do you predict, and why?", "params": {"d": {"6": [3, 7], "8": [5, 14]}}},
    {"id": "science-reasoning-2", "subject": "science", "task_type": "reasoning", "text": "A student says heavier objects always fall faster. How could you test that with {objects}?", "params": {"objects": {"choices": {"6": ["two balls", "a book and a sheet of paper"], "8": ["a marble and a bowling ball", "two crumpled sheets of paper"]}}}},
    {"id": "science-reasoning-3", "subject": "science", "task_type": "reasoning", "text": "Why might a {animal} living in the desert have {trait}?", "params": {"animal": {"choices": {"6": ["fox", "lizard"], "8": ["camel", "fennec fox", "kangaroo rat"]}}, "trait": {"choices": {"6": ["big ears", "light fur"], "8": ["efficient kidneys", "a nocturnal habit"]}}}},
    {"id": "science-reasoning-4", "subject": "science", "task_type": "reasoning", "text": "Salt dissolves faster in warm water than in cold water. Explain what is happening at the level of {level}.", "params": {"level": {"choices": {"6": ["tiny pieces", "the water"], "8": ["particles", "molecules"]}}}},
    {"id": "science-reasoning-5", "subject": "science", "task_type": "reasoning", "text": "If a lake loses {p} percent of its fish, which other living things could be affected? Explain the chain.", "params": {"p": {"6": [20, 60], "8": [10, 80]}}}
  ]
}
)ASSET";

inline constexpr std::string_view kJudgePromptV1 = R"ASSET(You are an expert teacher grading one AI tutoring session for a middle school student.

Student profile:
{{profile}}

Tutor instructions (the prompt the tutor was given):
<<<PROMPT
{{prompt}}
PROMPT>>>

Session transcript:
<<<TRANSCRIPT
{{transcript}}
TRANSCRIPT>>>

Rate the tutor's responses on a 1 to 5 scale (1 = very poor, 5 = excellent) for each dimension:
- grade: Grade Appropriateness. Vocabulary, sentence length and content fit the student's grade.
- scaffolding: Scaffolding Quality. Support matches the student's knowledge level, breaking tasks down or stepping back as needed.
- adaptivity: Adaptivity Across Turns. The tutor adjusts its support as the student's answers and signals change.

Reply with a single JSON object and nothing else:
{"grade": <1-5>, "scaffolding": <1-5>, "adaptivity": <1-5>, "rationale": "<one or two sentences>"}
)ASSET";

}  // namespace scaffold::assets
