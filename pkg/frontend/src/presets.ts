/** Built-in example dialogs, mirrors of the repository fixtures. */

export interface Preset {
  name: string;
  spec: string;
}

export const PRESETS: Preset[] = [
  {
    name: "breakfast (weaving)",
    spec: "W[C[eggs^, toast], C[coffee^, cream?]]",
  },
  {
    name: "gas station (attendant call)",
    spec: "W[C[call-attendant, name], C[credit-card, octane^, receipt?]]",
  },
  {
    name: "gas station (interruptible pump)",
    spec: "W[C[credit-card^, octane^, receipt?], C[call-attendant-for-help, name]]",
  },
  {
    name: "coffee order (any grouping)",
    spec: "PE*[size, blend, type-of-milk]",
  },
  {
    name: "flight booking",
    spec: "C[departure-time, PE*[from, to], seat]",
  },
  {
    name: "mortgage form (one shot)",
    spec: "I[salary, credit-score, age]",
  },
  {
    name: "burrito bowl order",
    spec:
      "W[C[protein^, protein-double?], rice, beans, C[toppings^, toppings-extra?], " +
      "C[side-item^, side-amnt], C[nutrition-diet, nutrition-exit]]",
  },
  {
    name: "empty dialog",
    spec: "~",
  },
];
