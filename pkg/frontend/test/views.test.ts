import { describe, expect, it } from "vitest";

import type { BeliefsOut, QueueDoc, VerdictOut } from "../src/api.js";
import type { BeliefRow } from "../src/diff.js";
import {
  esc,
  renderBeliefPanel,
  renderQueue,
  renderToast,
  renderWhatIf,
} from "../src/views.js";

function row(over: Partial<BeliefRow>): BeliefRow {
  return {
    formula: "pkw(business)",
    rank: "0.856",
    protected: false,
    inCut: true,
    transition: null,
    status: "same",
    ...over,
  };
}

const SNAPSHOT: BeliefsOut = {
  beliefs: [],
  incons: "0.000",
  cut_size: 4,
  mode: "paper",
};

describe("belief panel", () => {
  it("shows the server's rank strings verbatim", () => {
    const html = renderBeliefPanel(SNAPSHOT, [
      row({ rank: "0.856" }),
      row({ formula: "p(a)", rank: "1.000" }),
    ]);
    expect(html).toContain(">0.856<");
    expect(html).toContain(">1.000<");
    expect(html).not.toContain("0.8560"); // no client re-formatting
  });

  it("marks protected, raised and struck rows", () => {
    const html = renderBeliefPanel(SNAPSHOT, [
      row({ protected: true }),
      row({ formula: "!pkw(sculpture)", status: "raised",
            transition: { before: "0.785", after: "0.856" } }),
      row({ formula: "!pkw(art)", status: "removed" }),
    ]);
    expect(html).toContain(`class="badge protected"`);
    expect(html).toContain(`class="belief raised"`);
    expect(html).toContain("0.785 &rarr; 0.856");
    expect(html).toContain(`class="belief removed"`);
  });

  it("escapes the formula text", () => {
    const html = renderBeliefPanel(SNAPSHOT, [
      row({ formula: "pkw(a) <-> pkw(b)" }),
    ]);
    expect(html).toContain("pkw(a) &lt;-&gt; pkw(b)");
  });

  it("prints Incons and cut size in the footer", () => {
    const html = renderBeliefPanel({ ...SNAPSHOT, incons: "0.400", cut_size: 2 }, []);
    expect(html).toContain("Incons <b>0.400</b>");
    expect(html).toContain("<b>2</b>");
  });
});

describe("review queue", () => {
  const docs: QueueDoc[] = [
    { id: "q-art", keywords: ["art"] },
    { id: "q-mix", keywords: ["business", "commerce"] },
  ];

  it("gives the focused document judgment and skip actions", () => {
    const html = renderQueue(docs, 0, false);
    expect(html).toContain(`data-action="judge" data-doc="q-art" data-judgment="R"`);
    expect(html).toContain(`data-action="judge" data-doc="q-art" data-judgment="N"`);
    expect(html).toContain(`data-action="skip"`);
    expect(html).not.toContain(`data-doc="q-mix" data-judgment`);
  });

  it("disables the buttons while a mutation is in flight", () => {
    const html = renderQueue(docs, 0, true);
    expect(html).toContain(`data-judgment="R" disabled`);
    expect(html).toContain(`data-action="skip" disabled`);
  });

  it("renders the empty state", () => {
    expect(renderQueue([], 0, false)).toContain("Nothing waiting");
  });
});

describe("what-if panel", () => {
  const verdict: VerdictOut = {
    relevant: true,
    degree: "0.856",
    premises: ["pkw(business) <-> pkw(commerce)", "pkw(business)"],
    incons: "0.000",
    cut_size: 5,
  };

  it("disables submit until there is input", () => {
    expect(renderWhatIf(null, false)).toContain("disabled>Filter");
    expect(
      renderWhatIf({ keywords: ["business"], verdict }, false),
    ).not.toContain("disabled>Filter");
  });

  it("shows verdict, degree and premises", () => {
    const html = renderWhatIf({ keywords: ["business", "commerce"], verdict }, false);
    expect(html).toContain("relevant");
    expect(html).toContain("degree 0.856");
    expect(html).toContain("pkw(business) &lt;-&gt; pkw(commerce)");
    expect(html).toContain(`class="verdict accepted"`);
  });

  it("styles rejections differently", () => {
    const html = renderWhatIf(
      { keywords: ["art"], verdict: { ...verdict, relevant: false, degree: "0.000", premises: [] } },
      false,
    );
    expect(html).toContain("not relevant");
    expect(html).toContain(`class="verdict rejected"`);
  });
});

describe("toast", () => {
  it("renders the no-change notice and nothing otherwise", () => {
    expect(renderToast("no belief changes")).toContain("no belief changes");
    expect(renderToast(null)).toBe("");
  });
});

describe("esc", () => {
  it("escapes html metacharacters", () => {
    expect(esc(`<b a="c">&`)).toBe("&lt;b a=&quot;c&quot;&gt;&amp;");
  });
});
