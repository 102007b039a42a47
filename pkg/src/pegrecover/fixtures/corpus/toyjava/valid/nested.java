public class Main {
  public static void main(String[] args) {
    int a = 1;
    if (a == 1) if (a < 2) a = 2; else a = 3;
    {
      while (a < 9) { a = a * (a + 1); }
    }
    System.out.println((a));
  }
}
