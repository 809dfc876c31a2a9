// Builds document markup in the same shape the renderer emits, small enough
// to reason about in unit tests.

export interface SectionSpec {
  steps: number; // number of steps in the section
  context?: boolean; // attach a context block (with a screenshot) per step
}

const PIXEL =
  "data:image/png;base64,iVBORw0KGgoAAAANSUhEUgAAAAEAAAABCAIAAACQd1PeAAAADElEQVR42mM4ceIEAAS0Alko01LsAAAAAElFTkSuQmCC";

export function artifactMarkup(sections: SectionSpec[], payload?: string): string {
  let step = 0;
  const entries: string[] = [];
  const blocks: string[] = [];
  const sectionPayload: { index: number; step_indices: number[] }[] = [];

  sections.forEach((spec, i) => {
    entries.push(
      `<a class="ov-entry" href="#section-${i}" data-section="${i}">` +
      `<span class="ov-dot"></span><span class="ov-label">Section ${i}</span>` +
      `<span class="ov-progress"></span></a>`);
    const items: string[] = [];
    const indices: number[] = [];
    for (let k = 0; k < spec.steps; k += 1) {
      items.push(
        `<li class="step" data-step="${step}">` +
        `<span class="cap">step ${step} caption</span></li>`);
      if (spec.context) {
        items.push(
          `<div class="context">` +
          `<a class="ctx-link primary" href="https://lms.example.edu/x">` +
          `https://lms.example.edu/x</a>` +
          `<img class="shot" alt="screenshot s${step}.png" src="${PIXEL}">` +
          `</div>`);
      }
      indices.push(step);
      step += 1;
    }
    sectionPayload.push({ index: i, step_indices: indices });
    blocks.push(
      `<section class="sec" id="section-${i}" data-section="${i}">` +
      `<h2>Section ${i}</h2><ol class="steps">${items.join("")}</ol></section>`);
  });

  const doc = payload ?? JSON.stringify({
    schema: "vpr-document",
    version: 1,
    title: "Fixture",
    steps: Array.from({ length: step }, (_, i) => ({ index: i })),
    sections: sectionPayload,
  });

  return (
    `<div class="wrap"><header class="doc"><h1>Fixture</h1></header>` +
    `<nav class="overview" id="overview">${entries.join("")}</nav>` +
    `<div class="toolbar" id="toolbar"></div>` +
    `<main>${blocks.join("")}</main></div>` +
    `<script type="application/json" id="vpr-data">${doc}</script>`
  );
}

export function captions(root: Document): string[] {
  return Array.from(root.querySelectorAll(".cap")).map((el) => el.textContent || "");
}
