#!/usr/bin/env python3
# Writes the scripted-provider replies used to record the tinynet cassettes.
import json
import pathlib

HERE = pathlib.Path(__file__).resolve().parent / "tinynet"


def doc(responses):
    return {"schema": "scifig/1", "responses": responses}


hierarchy = {
    "schema": "scifig/1",
    "modules": [
        {
            "id": "M1",
            "title": "Feature Extraction",
            "components": [
                {"id": "input_image", "label": "Input Image", "kind": "icon", "description": "RGB image"},
                {"id": "cnn_encoder", "label": "CNN Encoder", "kind": "box", "description": "encoder at 1/8 resolution"},
            ],
            "intra_edges": [["input_image", "cnn_encoder"]],
        },
        {
            "id": "M2",
            "title": "Context Modeling",
            "components": [
                {"id": "self_attention", "label": "Multi-Head Self-Attention", "kind": "box",
                 "description": "attention over grid cells"},
                {"id": "fusion", "label": "+", "kind": "operator", "description": "residual sum fusion"},
            ],
            "intra_edges": [["self_attention", "fusion"]],
        },
        {
            "id": "M3",
            "title": "Prediction",
            "components": [
                {"id": "decoder", "label": "Decoder", "kind": "box", "description": "upsampling decoder"},
                {"id": "seg_mask", "label": "Segmentation Mask", "kind": "icon", "description": "per-class mask"},
                {"id": "ce_loss", "label": "Cross-Entropy Loss", "kind": "text", "description": "pixel-wise loss"},
            ],
            "intra_edges": [["decoder", "seg_mask"], ["seg_mask", "ce_loss"]],
        },
    ],
    "relationships": [
        {"from_module": "M1", "to_module": "M2", "kind": "sequential"},
        {"from_module": "M2", "to_module": "M3", "kind": "sequential"},
    ],
}

feedback = [
    {"issues": [
        {"category": "spacing", "severity": "major", "targets": ["decoder", "seg_mask", "ce_loss"],
         "guidance": "The prediction blocks are packed too tightly."},
        {"category": "alignment", "severity": "minor", "targets": ["input_image", "cnn_encoder"],
         "guidance": "Input and encoder sit on different baselines."},
    ]},
    {"issues": [
        {"category": "label_readability", "severity": "minor", "targets": ["self_attention"],
         "guidance": "The attention label is cut off."},
    ]},
    {"issues": [
        {"category": "arrow_clarity", "severity": "minor", "targets": ["conn-0"],
         "guidance": "The first arrow hugs the frame border."},
    ]},
]

generate = [{"purpose": "extract", "json": hierarchy}]
for i, fb in enumerate(feedback, start=1):
    generate.append({"purpose": "feedback", "match": f"Round: {i}\n", "json": fb})

common = {
    "R1": ["Are the encoder, attention and decoder blocks named with standard terms?",
           "Does the data flow follow the order of operations in the method?",
           "Are the operator symbols used consistently with their meaning?",
           "Is each architectural block connected to the correct neighbours?"],
    "R2": ["Can each block be told apart from its neighbours at a glance?",
           "Is the direction of information flow unambiguous?",
           "Are all labels legible at the printed size?",
           "Is the figure free of crowded regions?",
           "Do shapes and colors encode the block types?"],
    "R3": ["Do the stages read in a clear left-to-right order?",
           "Are module boundaries visible?",
           "Are the connections between modules explicit?"],
    "R4": ["Are similar blocks drawn with the same shape and style?",
           "Is terminology consistent across labels?",
           "Does the figure use balanced white space?",
           "Is the visual style coherent across modules?"],
    "R5": ["Could a reader follow the method without the paper text?",
           "Are familiar symbols used for images, operators and losses?",
           "Is the figure readable without relying on color alone?",
           "Are non-obvious symbols explained?"],
    "R6": ["Are the lines crisp and free of artifacts?",
           "Is typography consistent and professional?",
           "Is the canvas used without wasted space?"],
}

facts = [
    "the input is a single RGB image", "a CNN encoder processes the input image",
    "the encoder output is a grid of feature vectors", "the feature grid is at one eighth of the input resolution",
    "the features enter a context block", "the context block contains self-attention",
    "the attention is multi-head", "attention relates every grid cell to every other cell",
    "a fusion operator follows the attention layer", "fusion adds attended features back to encoder features",
    "the fusion is a residual sum", "the encoder output skips around the attention layer",
    "a decoder follows the context block", "the decoder is lightweight",
    "the decoder upsamples to full resolution", "the decoder predicts a segmentation mask",
    "the mask has one channel per class", "the mask is compared with the ground truth",
    "the loss is cross-entropy", "the loss is computed pixel-wise",
    "the loss is the only training signal", "there are three stages in total",
    "feature extraction comes first", "context modeling comes second",
    "prediction comes last", "the encoder and attention are in different modules",
    "the decoder and the loss are in the same module", "the mask is an output of the decoder",
    "ground truth enters only at the loss", "no other input than the image is needed",
    "the attention operates on the encoder features", "the fusion output feeds the decoder",
    "the mask resolution matches the input resolution", "the decoder does not use attention",
    "the network is trained end to end", "the task is semantic segmentation",
    "the figure names the network TinyNet", "the residual path is visible",
    "the output is per-pixel", "each stage has a titled frame",
]
paper = [f"Does the figure show that {f}?" for f in facts]

evaluation = []
for rid, qs in common.items():
    evaluation.append({"purpose": "common_questions", "match": f"Rubric {rid}:", "json": {"questions": qs}})
evaluation.append({"purpose": "paper_questions", "json": {"questions": paper}})

scores = {"R1": [8, 7, 8, 7], "R2": [7, 6, 5, 7, 8], "R3": [9, 8, 7], "R4": [8, 8, 6, 7],
          "R5": [6, 7, 5, 6], "R6": [7, 6, 8]}
for rid, vals in scores.items():
    for k, s in enumerate(vals, start=1):
        qid = f"{rid}-q{k:02d}"
        if qid == "R2-q03":
            # free-form first reply; the format retry supplies the score
            evaluation.append({"purpose": "answer", "match": f"Question ID: {qid}\n",
                               "text": "Most labels can be read but the attention label is small."})
        evaluation.append({"purpose": "answer", "match": f"Question ID: {qid}\n",
                           "text": f"SCORE: {s}\nJUSTIFICATION: Checked {qid} against the drawing."})
for k in range(1, len(paper) + 1):
    qid = f"tinynet-q{k:02d}"
    s = 9 if k % 5 else 4
    evaluation.append({"purpose": "answer", "match": f"Question ID: {qid}\n",
                       "text": f"SCORE: {s}\nJUSTIFICATION: Fact {k} {'is' if s > 5 else 'is not clearly'} shown."})

(HERE / "script.json").write_text(json.dumps(doc(generate), indent=2) + "\n")
(HERE / "eval_script.json").write_text(json.dumps(doc(evaluation), indent=2) + "\n")
print(f"{len(generate)} generate replies, {len(evaluation)} evaluation replies")
