/**
 * The six scoring dimensions shown to annotators, with the full 0..3 anchor
 * descriptions and examples. Keys match the review service's rubric fields.
 */

export type Dimension =
  | 'fluency'
  | 'relevance'
  | 'multi_hop_reasoning'
  | 'engagingness'
  | 'factual_correctness'
  | 'inclusiveness'

export type Score = 0 | 1 | 2 | 3

export const SCORES: readonly Score[] = [0, 1, 2, 3]

export interface ScoreAnchor {
  score: Score
  label: string
  example: string
}

export interface RubricBlock {
  key: Dimension
  title: string
  description: string
  anchors: ScoreAnchor[]
}

export const RUBRIC: readonly RubricBlock[] = [
  {
    key: 'fluency',
    title: 'Fluency',
    description:
      'Evaluates the grammatical correctness and naturalness of the generated question.',
    anchors: [
      {
        score: 0,
        label: 'Poor (Grammatical errors and awkward phrasing)',
        example: '"What doing is Chandler wife cooking?"',
      },
      {
        score: 1,
        label: 'Fair (Some grammatical errors, but understandable)',
        example: '"What Chandler wife cooking?"',
      },
      {
        score: 2,
        label: 'Good (Grammatically correct)',
        example: '"What is the wife of Chandler cooking?"',
      },
      {
        score: 3,
        label: 'Excellent (Fluent and natural language with no errors)',
        example: '"What is Chandler\'s wife cooking?"',
      },
    ],
  },
  {
    key: 'relevance',
    title: 'Relevance',
    description:
      'Assesses the extent to which the generated question pertains to the content of the provided video clips.',
    anchors: [
      {
        score: 0,
        label: 'Irrelevant (Does not relate to the video)',
        example: '"What is the capital of France?"',
      },
      {
        score: 1,
        label: 'Slightly relevant (Partially relates to the video)',
        example: '"Are there any people in the video?"',
      },
      {
        score: 2,
        label: 'Mostly relevant (Mostly relates to the Videos)',
        example: '"Are there people dancing in these videos?"',
      },
      {
        score: 3,
        label: 'Highly relevant (Directly relates to the images)',
        example: '"What is the connection between the people dancing in these Videos?"',
      },
    ],
  },
  {
    key: 'multi_hop_reasoning',
    title: 'Multi-Hop Reasoning',
    description:
      'Evaluates the complexity of reasoning required to answer the generated question based on the provided video clips.',
    anchors: [
      {
        score: 0,
        label: 'Single-hop (Only needs one Video for the answer)',
        example: '"Is Monica dancing in the first video?"',
      },
      {
        score: 1,
        label: 'Simple multi-hop (Requires basic information from both videos)',
        example: '"Are People dancing in both Videos?"',
      },
      {
        score: 2,
        label: 'Intermediate multi-hop (Requires more complex connections between images)',
        example: '"Are the same people dancing in both videos?"',
      },
      {
        score: 3,
        label: 'Advanced multi-hop (Involves detailed reasoning using both images)',
        example: '"what is the relation between the common people dancing in both videos?"',
      },
    ],
  },
  {
    key: 'engagingness',
    title: 'Engagingness',
    description:
      'Evaluates how interesting and captivating the generated question is to a human observer.',
    anchors: [
      {
        score: 0,
        label: 'Not engaging (Boring or uninteresting)',
        example: '"Are there hats in the videos?"',
      },
      {
        score: 1,
        label: 'Slightly engaging (Mildly interesting)',
        example: '"What colours are the hats in the videos?"',
      },
      {
        score: 2,
        label: 'Moderately engaging (Interesting and engaging)',
        example: '"How do the styles of hats in the videos differ?"',
      },
      {
        score: 3,
        label: 'Highly engaging (Very interesting and captivating)',
        example:
          '"What do the hats in the videos reveal about the event going on and time period of the scenes depicted?"',
      },
    ],
  },
  {
    key: 'factual_correctness',
    title: 'Factual Correctness',
    description:
      'Evaluates whether the generated question contains any factual inaccuracies.',
    anchors: [
      {
        score: 0,
        label: 'Incorrect (factually incorrect)',
        example:
          '"Why does Chandler want to leave after hanging out with the group, which includes Amy and Emma?" (Emma and Amy both are wrong)',
      },
      {
        score: 1,
        label:
          'Mostly Incorrect (contains major factual errors, though a small part of the content may be accurate)',
        example:
          '"Why does Chandler want to leave after hanging out with the group, which includes Joey and Amy?" (Joey is correct, Amy is wrong)',
      },
      {
        score: 2,
        label:
          'Partially Correct (factually accurate in the main aspect but contains a minor mistake or omission)',
        example:
          '"Why does Chandler want to leave after hanging out with the group, which includes Joey?"',
      },
      {
        score: 3,
        label: 'Factually correct',
        example:
          '"Why does Chandler want to leave after hanging out with the group, which includes Joey and Monica?"',
      },
    ],
  },
  {
    key: 'inclusiveness',
    title: 'Inclusiveness',
    description:
      'Evaluates whether the generated question is inclusive and avoids any potentially biased or discriminatory language.',
    anchors: [
      {
        score: 0,
        label:
          'Not inclusive (The question contains biased or discriminatory language or assumptions)',
        example: '"Why are the women in the video acting emotionally?"',
      },
      {
        score: 1,
        label:
          'Slightly inclusive (The question is mostly neutral but could be phrased more inclusively)',
        example:
          '"What are the people in the video doing?" (If the context strongly implies a specific gender)',
      },
      {
        score: 2,
        label:
          'Moderately inclusive (The question attempts to use neutral language but might still have some underlying assumptions)',
        example: '"What is the role of each person in the scene?"',
      },
      {
        score: 3,
        label:
          'Highly inclusive (The question uses neutral and respectful language, avoiding any biased or discriminatory assumptions about gender, race, age, etc.)',
        example: '"What actions are the individuals performing in the video?"',
      },
    ],
  },
]

export const DIMENSIONS: readonly Dimension[] = RUBRIC.map((block) => block.key)
