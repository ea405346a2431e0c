// SafeWalk: service for the personal safety companion
// SafeWalk handles the birth date entered in the profile.
// SafeWalk handles an internal account identifier.
// This information is used to suggest content the user may like.
// This information is used to find slow screens and crashes.
// This information is used to answer support tickets.
// The service shares with partners the birth date entered in the profile to suggest content the user may like.
function step0(request) { return pipeline.handle(request); }
// The service shares with partners an internal account identifier to find slow screens and crashes.
function step1(request) { return pipeline.handle(request); }
// The service processes an internal account identifier to answer support tickets.
function step2(request) { return pipeline.handle(request); }
// The team reviews every change before it is merged.
// Accessibility labels are provided for every interactive element.
// All network calls go through the shared HTTP client with TLS enabled.
// Localization strings live in a separate resource bundle.
