public class Main {
  public static void main(String[] args) {
    int r = 1;
    while (r < 10) {
      r = r * 2;
    }
    System.out.println(r);
  }
}
