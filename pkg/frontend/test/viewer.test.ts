import { beforeEach, describe, expect, it } from "vitest";

import { initViewer, ViewerApi } from "../src/viewer";
import { artifactMarkup, captions } from "./helpers";

function mount(markup: string): ViewerApi | null {
  document.body.innerHTML = markup;
  return initViewer(document);
}

function mountContextDoc(): ViewerApi {
  const api = mount(artifactMarkup([
    { steps: 2, context: true },
    { steps: 1, context: true },
    { steps: 2, context: true },
  ]));
  expect(api).not.toBeNull();
  return api as ViewerApi;
}

beforeEach(() => {
  document.body.innerHTML = "";
  delete (globalThis as { __vprViewer?: unknown }).__vprViewer;
});

describe("init", () => {
  it("starts at section 0 with a clean state", () => {
    const api = mountContextDoc();
    expect(api.state.currentSection).toBe(0);
    expect(api.state.completedSteps.size).toBe(0);
    expect(api.state.zoomedAsset).toBeNull();
    const entries = document.querySelectorAll(".ov-entry");
    expect(entries[0].classList.contains("active")).toBe(true);
    expect(entries[1].classList.contains("active")).toBe(false);
  });

  it("shows an error banner on a corrupt payload, never a blank page", () => {
    const api = mount(artifactMarkup([{ steps: 1 }], "{corrupt"));
    expect(api).toBeNull();
    expect(document.querySelector(".vpr-error-banner")).not.toBeNull();
    expect(captions(document)).toEqual(["step 0 caption"]); // content intact
  });

  it("rejects a payload with the wrong shape", () => {
    const api = mount(artifactMarkup([{ steps: 1 }],
      JSON.stringify({ schema: "other", version: 1 })));
    expect(api).toBeNull();
    expect(document.querySelector(".vpr-error-banner")).not.toBeNull();
  });

  it("context starts visible for context formats", () => {
    const api = mountContextDoc();
    expect(api.state.contextOn).toBe(true);
    expect(document.querySelectorAll(".context[hidden]")).toHaveLength(0);
  });

  it("context formats get a working toolbar toggle; bare formats do not", () => {
    mountContextDoc();
    expect(document.getElementById("ctx-toggle")).not.toBeNull();
    const bare = mount(artifactMarkup([{ steps: 2 }]));
    expect(bare!.state.contextOn).toBe(false);
    expect(document.getElementById("ctx-toggle")).toBeNull();
  });
});

describe("context toggle", () => {
  it("hides every context block, screenshots included", () => {
    const api = mountContextDoc();
    api.toggleContext();
    const hidden = document.querySelectorAll(".context[hidden]");
    expect(hidden).toHaveLength(5);
    const hiddenShots = document.querySelectorAll(".context[hidden] img.shot");
    expect(hiddenShots).toHaveLength(5);
    expect(api.state.contextOn).toBe(false);
  });

  it("is an involution: toggling twice restores the initial view", () => {
    const api = mountContextDoc();
    const before = document.body.innerHTML;
    api.toggleContext();
    api.toggleContext();
    expect(document.body.innerHTML).toBe(before);
  });

  it("keeps captions and step order unchanged", () => {
    const api = mountContextDoc();
    const before = captions(document);
    api.toggleContext();
    expect(captions(document)).toEqual(before);
  });

  it("is disabled when the document has no context", () => {
    const api = mount(artifactMarkup([{ steps: 2 }]))!;
    api.toggleContext();
    expect(api.state.contextOn).toBe(false);
  });
});

describe("navigation", () => {
  it("clicking an overview entry activates its section", () => {
    mountContextDoc();
    const entries = document.querySelectorAll<HTMLElement>(".ov-entry");
    entries[2].dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(entries[2].classList.contains("active")).toBe(true);
    expect(entries[0].classList.contains("active")).toBe(false);
  });

  it("scroll tracking highlights the topmost visible section", () => {
    const api = mountContextDoc();
    api.onSectionVisibility(1, true);
    api.onSectionVisibility(2, true);
    expect(api.state.currentSection).toBe(1);
    api.onSectionVisibility(1, false);
    expect(api.state.currentSection).toBe(2);
  });

  it("keyboard next/prev cycles through sections in order", () => {
    const api = mountContextDoc();
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "n", bubbles: true }));
    expect(api.state.currentSection).toBe(1);
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "n", bubbles: true }));
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "n", bubbles: true }));
    expect(api.state.currentSection).toBe(0); // wrapped
    document.dispatchEvent(new KeyboardEvent("keydown", { key: "p", bubbles: true }));
    expect(api.state.currentSection).toBe(2);
  });
});

describe("check-off", () => {
  it("marks steps completed and reports section progress", () => {
    const api = mountContextDoc();
    api.checkOff(0);
    const entry = document.querySelectorAll<HTMLElement>(".ov-entry")[0];
    expect(entry.querySelector(".ov-progress")!.textContent).toBe("1/2");
    expect(entry.classList.contains("done")).toBe(false);
    api.checkOff(1);
    expect(entry.querySelector(".ov-progress")!.textContent).toBe("2/2");
    expect(entry.classList.contains("done")).toBe(true);
  });

  it("is idempotent per step", () => {
    const api = mountContextDoc();
    api.checkOff(2);
    api.checkOff(2);
    expect(api.state.completedSteps.size).toBe(1);
    const node = document.querySelector('[data-step="2"]')!;
    expect(node.classList.contains("completed")).toBe(true);
  });

  it("check buttons are injected and clickable", () => {
    const api = mountContextDoc();
    const button = document.querySelector<HTMLElement>(
      '[data-step="0"] button.check')!;
    button.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(api.state.completedSteps.has(0)).toBe(true);
  });
});

describe("zoom", () => {
  it("opens an overlay for a screenshot and dismisses it", () => {
    const api = mountContextDoc();
    const shot = document.querySelector<HTMLElement>("img.shot")!;
    shot.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(api.state.zoomedAsset).toBe(shot.getAttribute("src"));
    const overlay = document.querySelector<HTMLElement>(".vpr-zoom-overlay")!;
    expect(overlay.querySelector("img")).not.toBeNull();
    overlay.dispatchEvent(new MouseEvent("click", { bubbles: true }));
    expect(api.state.zoomedAsset).toBeNull();
    expect(document.querySelector(".vpr-zoom-overlay")).toBeNull();
  });
});

describe("composition", () => {
  it("never mutates the embedded payload and keeps captions stable", () => {
    const api = mountContextDoc();
    const payloadBefore = document.getElementById("vpr-data")!.textContent;
    const captionsBefore = captions(document);

    let seed = 123456789;
    const rand = (n: number) => {
      seed = (seed * 1103515245 + 12345) % 2147483648;
      return seed % n;
    };
    const entries = Array.from(document.querySelectorAll<HTMLElement>(".ov-entry"));
    for (let i = 0; i < 100; i += 1) {
      switch (rand(6)) {
        case 0: api.toggleContext(); break;
        case 1: api.checkOff(rand(5)); break;
        case 2: entries[rand(entries.length)]
          .dispatchEvent(new MouseEvent("click", { bubbles: true })); break;
        case 3: document.dispatchEvent(
          new KeyboardEvent("keydown", { key: "n", bubbles: true })); break;
        case 4: api.zoom("data:image/png;base64,"); break;
        default: api.dismissZoom(); break;
      }
    }
    expect(document.getElementById("vpr-data")!.textContent).toBe(payloadBefore);
    expect(captions(document)).toEqual(captionsBefore);
  });
});
